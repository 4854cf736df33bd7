"""Command-line interface.

Subcommands: explain, envmatch, dimdist, pcir, mcir, synth, bench.  Exit
codes: 0 success, 2 input errors, 3 degenerate-information errors, 1 anything
else.  Flag precedence is CLI > config file > defaults; the config file is
plain ``key = value`` lines.  Set EXCIR_LOG to control log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .data import load_dataset, write_dataset
from .dimdist import EmpiricalMeasure, SearchConfig, distance_hat
from .envmatch import RiskSearchConfig, risk_minimize
from .errors import DegenerateFeatureError, ExcirError, InputError
from .infotheory import discretize
from .mcir import mcir_full, mcir_pair
from .models import parse_model_flag
from .pcir import pcir as pcir_score
from .pipeline import ExplainConfig, default_n_prime, explain_dataset
from .report import dumps_report, plot_data_csv
from .synthgen import PRESETS, preset

logger = logging.getLogger("excir.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


def _csv_names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _read_config_file(path: str) -> dict[str, str]:
    p = Path(path)
    if not p.exists():
        raise InputError(f"no such config file: {p}")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"{p}:{lineno}: expected 'key = value'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _subparser_for(
    parser: argparse.ArgumentParser, command: str
) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise InputError("parser has no subcommands")


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if not getattr(args, "config", None):
        return
    overrides = _read_config_file(args.config)
    sub = _subparser_for(parser, args.command)
    defaults = {a.dest: a.default for a in sub._actions}
    for key, text in overrides.items():
        if key == "lambda":
            key = "lam"
        if not hasattr(args, key):
            raise InputError(f"config file sets unknown option {key!r}")
        if getattr(args, key) != defaults.get(key):
            continue  # CLI flag wins
        current = defaults.get(key)
        if isinstance(current, bool):
            setattr(args, key, text.lower() in ("1", "true", "yes", "on"))
        elif isinstance(current, int) and not isinstance(current, bool):
            setattr(args, key, int(text))
        elif isinstance(current, float):
            setattr(args, key, float(text))
        else:
            setattr(args, key, text)


def _add_data_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--data", required=True, help="input CSV with header row")
    sp.add_argument("--output-col", help="name of the output column")
    sp.add_argument("--discrete", default="", help="comma-separated discrete hints")
    sp.add_argument("--continuous", default="", help="comma-separated continuous hints")


def _add_search_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--n-prime", type=int, default=0, help="sample size (0 = auto)")
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--candidates", type=int, default=32)
    sp.add_argument("--refine-iters", type=int, default=50)
    sp.add_argument("--divergence", choices=["kl", "js"], default="js")
    sp.add_argument("--bins", type=int, default=8)
    sp.add_argument("--epsilon", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="excir",
        description="Correlation-impact feature attribution for tabular data",
    )
    parser.add_argument("--version", action="version", version=f"excir {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explain", help="full pipeline producing report.json")
    _add_data_flags(p)
    p.add_argument("--model", help="precomputed:<col> | exec:<cmd> | synthetic:<truth.json>")
    p.add_argument("--mode", choices=["independent", "pairwise", "full"], default="pairwise")
    _add_search_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=0, help="0 = available parallelism")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--emit-plot-data", action="store_true")
    p.add_argument("--config", help="key = value config file")

    p = sub.add_parser("envmatch", help="lightweight-sample search diagnostics")
    _add_data_flags(p)
    _add_search_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="key = value config file")

    p = sub.add_parser("dimdist", help="distance between two point clouds")
    p.add_argument("--data", required=True, help="CSV of numeric columns (first cloud)")
    p.add_argument("--data2", required=True, help="CSV of numeric columns (second cloud)")
    p.add_argument("--divergence", choices=["kl", "js"], default="js")
    p.add_argument("--bins", type=int, default=32)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--refine-iters", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("pcir", help="per-feature correlation-impact ratios")
    _add_data_flags(p)

    p = sub.add_parser("mcir", help="per-feature mutual correlation-impact ratios")
    _add_data_flags(p)
    p.add_argument("--mode", choices=["pairwise", "full"], default="pairwise")
    p.add_argument("--bins", type=int, default=8)

    p = sub.add_parser("synth", help="write a synthetic dataset plus truth sidecar")
    p.add_argument("--preset", choices=list(PRESETS), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("bench", help="wall-time vs sample size CSV")
    p.add_argument("--n-prime", required=True, help="comma-separated sample sizes")
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--out", default="-", help="CSV path or - for stdout")
    return parser


def _print_json(payload: Any) -> None:
    sys.stdout.write(dumps_report(payload))


def _load_from_args(args: argparse.Namespace):
    return load_dataset(
        args.data,
        output_col=args.output_col,
        discrete=_csv_names(args.discrete),
        continuous=_csv_names(args.continuous),
    )


def _require_output(args: argparse.Namespace) -> None:
    if not args.output_col:
        raise InputError("--output-col is required for this command")


def cmd_explain(args: argparse.Namespace) -> int:
    if not args.output_col and not args.model:
        raise InputError("need --output-col or --model to define predictions")
    dataset = _load_from_args(args)
    model = parse_model_flag(args.model) if args.model else None
    cfg = ExplainConfig(
        mode=args.mode,
        bins=args.bins,
        n_prime=args.n_prime or None,
        lam=args.lam,
        candidates=args.candidates,
        refine_iters=args.refine_iters,
        divergence=args.divergence,
        epsilon=args.epsilon,
        seed=args.seed,
        threads=args.threads or None,
    )
    report = explain_dataset(dataset, model, cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.json"
    report_path.write_text(dumps_report(report), encoding="utf-8")
    logger.info("wrote %s", report_path)
    if args.emit_plot_data:
        (out_dir / "report.csv").write_text(plot_data_csv(report), encoding="utf-8")
        logger.info("wrote %s", out_dir / "report.csv")
    sys.stdout.write(f"{report_path}\n")
    return EXIT_OK


def cmd_envmatch(args: argparse.Namespace) -> int:
    _require_output(args)
    dataset = _load_from_args(args)
    n_prime = args.n_prime or default_n_prime(dataset.n)
    cfg = RiskSearchConfig(
        n_prime=n_prime,
        lam=args.lam,
        candidates=args.candidates,
        refine_iters=args.refine_iters,
        seed=args.seed,
        divergence=args.divergence,
        bins=args.bins,
    )
    from .models import PrecomputedModel

    assert dataset.output_name is not None
    env, loss = risk_minimize(dataset, PrecomputedModel(dataset.output_name), cfg, args.epsilon)
    _print_json(
        {
            "d2_final": env.d2_final,
            "d2_prime_final": env.d2_prime_final,
            "gap": env.gap,
            "loss_bits": loss,
            "selected_rows": list(env.selected_rows or ()),
        }
    )
    return EXIT_OK


def _load_cloud(path: str) -> EmpiricalMeasure:
    ds = load_dataset(path)
    return EmpiricalMeasure.from_points(ds.matrix())


def cmd_dimdist(args: argparse.Namespace) -> int:
    a = _load_cloud(args.data)
    b = _load_cloud(args.data2)
    mu, delta = (a, b) if a.dim <= b.dim else (b, a)
    result = distance_hat(
        mu,
        delta,
        kind=args.divergence,
        bins=args.bins,
        search=SearchConfig(args.restarts, args.refine_iters, args.seed),
        epsilon=args.epsilon,
    )
    _print_json(
        {
            "distance_bits": result.value,
            "projection_bits": result.projection,
            "embedding_bits": result.embedding,
            "disagreement_bits": result.disagreement,
        }
    )
    return EXIT_OK


def cmd_pcir(args: argparse.Namespace) -> int:
    _require_output(args)
    dataset = _load_from_args(args)
    assert dataset.output is not None
    scores = [pcir_score(col, dataset.output) for col in dataset.features]
    _print_json(
        [
            {
                "name": s.feature,
                "pcir": s.eta,
                "direction": s.direction,
                "f_mean": s.f_mean,
                "y_mean": s.y_mean,
                "joint_mean": s.joint_mean,
            }
            for s in scores
        ]
    )
    return EXIT_OK


def cmd_mcir(args: argparse.Namespace) -> int:
    _require_output(args)
    dataset = _load_from_args(args)
    assert dataset.output is not None
    if dataset.k < 2:
        raise InputError("mcir needs at least two features")
    y_col = discretize(dataset.output, args.bins)
    cols = [discretize(c, args.bins) for c in dataset.features]
    scores = []
    degenerate: list[str] = []
    for i, col in enumerate(dataset.features):
        try:
            if args.mode == "full":
                scores.append(mcir_full(y_col, i, cols, names=dataset.names))
            else:
                from .pipeline import _pair_partner

                j = _pair_partner(i, cols)
                scores.append(mcir_pair(y_col, cols[i], cols[j], name=col.name))
        except DegenerateFeatureError as exc:
            degenerate.extend(exc.features)
    if degenerate:
        raise DegenerateFeatureError(sorted(set(degenerate)))
    _print_json(
        [
            {
                "name": s.feature,
                "mcir": s.mcir,
                "cmmi_bits": s.cmmi_bits,
                "jmi_bits": s.jmi_bits,
                "joint_mutual_impact": s.joint_mutual_impact,
            }
            for s in scores
        ]
    )
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    dataset, truth = preset(args.preset, args.n, args.seed, args.noise)
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    write_dataset(dataset, out)
    sidecar = out.with_suffix(out.suffix + ".truth.json") if out.suffix != ".csv" else out.with_suffix(".truth.json")
    sidecar.write_text(
        json.dumps(truth.to_json_dict(), indent=2) + "\n", encoding="utf-8"
    )
    sys.stdout.write(f"{out}\n{sidecar}\n")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = [int(s) for s in _csv_names(args.n_prime)]
    if not sizes:
        raise InputError("--n-prime needs at least one size")
    dataset, _ = preset("independent_k4", args.n, args.seed)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["n_prime", "seconds"])
    for size in sizes:
        if size > dataset.n:
            raise InputError(f"n_prime {size} exceeds generated rows {dataset.n}")
        cfg = ExplainConfig(mode="pairwise", bins=args.bins, n_prime=size, seed=args.seed)
        start = time.perf_counter()
        explain_dataset(dataset, None, cfg)
        writer.writerow([size, f"{time.perf_counter() - start:.6f}"])
    text = buf.getvalue()
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
        sys.stdout.write(f"{args.out}\n")
    return EXIT_OK


_COMMANDS = {
    "explain": cmd_explain,
    "envmatch": cmd_envmatch,
    "dimdist": cmd_dimdist,
    "pcir": cmd_pcir,
    "mcir": cmd_mcir,
    "synth": cmd_synth,
    "bench": cmd_bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("EXCIR_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args, parser)
        return _COMMANDS[args.command](args)
    except DegenerateFeatureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ExcirError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
