/**
 * Node bindings for the excir attribution pipeline.
 *
 * These are deliberately thin: every call shells out to the CLI and parses
 * the JSON it produces, so the numbers returned here are bit-identical to
 * what the CLI writes (same core, same serializer).  Set EXCIR_PY to choose
 * the Python interpreter that has the package installed (default: python3).
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export class ExcirError extends Error {}
/** Invalid files, shapes, names or configuration (CLI exit code 2). */
export class InputError extends ExcirError {}
/** A score was 0/0 for one or more features (CLI exit code 3). */
export class DegenerateInformationError extends ExcirError {}

export type Mode = "independent" | "pairwise" | "full";
export type ColumnKind = "discrete" | "continuous";
export type Direction = "numerator" | "denominator";

export interface FeatureReport {
  name: string;
  kind: ColumnKind;
  direction: Direction;
  pcir: number;
  mcir?: number;
  entropy_bits: number;
  cmmi_bits?: number;
}

export interface ReportGlobals {
  n: number;
  n_prime: number;
  env_gap: number;
  output_divergence_bits: number;
  jmi_bits?: number;
  joint_mutual_impact?: number;
  seed: number;
}

export interface Report {
  version: string;
  config: Record<string, unknown>;
  globals: ReportGlobals;
  features: FeatureReport[];
}

export interface PcirScore {
  name: string;
  pcir: number;
  direction: Direction;
  f_mean: number;
  y_mean: number;
  joint_mean: number;
}

export interface McirScore {
  name: string;
  mcir: number;
  cmmi_bits: number;
  jmi_bits: number;
  joint_mutual_impact: number;
}

export type Columns = Record<string, readonly number[]>;

export interface CommonOptions {
  outputCol?: string;
  discrete?: readonly string[];
  continuous?: readonly string[];
}

export interface ExplainOptions extends CommonOptions {
  mode?: Mode;
  bins?: number;
  nPrime?: number;
  seed?: number;
  lambda?: number;
  candidates?: number;
  divergence?: "kl" | "js";
  epsilon?: number;
  threads?: number;
  model?: string; // precomputed:<col> | exec:<cmd> | synthetic:<truth.json>
}

const pythonExe = (): string => process.env.EXCIR_PY ?? "python3";

function runCli(args: string[]): string {
  const res = spawnSync(pythonExe(), ["-m", "excir.cli", ...args], {
    encoding: "utf-8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (res.error) {
    throw new ExcirError(`could not launch the excir CLI: ${res.error.message}`);
  }
  if (res.status !== 0) {
    const detail = (res.stderr || res.stdout || "").trim();
    if (res.status === 2) throw new InputError(detail);
    if (res.status === 3) throw new DegenerateInformationError(detail);
    throw new ExcirError(detail || `CLI exited with ${res.status}`);
  }
  return res.stdout;
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "excir-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

export function columnsToCsv(columns: Columns): string {
  const names = Object.keys(columns);
  if (names.length === 0) throw new InputError("no columns given");
  const length = columns[names[0]].length;
  for (const name of names) {
    if (columns[name].length !== length) {
      throw new InputError(`column ${name} has mismatched length`);
    }
  }
  const lines = [names.join(",")];
  for (let i = 0; i < length; i++) {
    lines.push(names.map((name) => String(columns[name][i])).join(","));
  }
  return lines.join("\n") + "\n";
}

function materialize(data: string | Columns, dir: string): string {
  if (typeof data === "string") return data;
  const path = join(dir, "data.csv");
  writeFileSync(path, columnsToCsv(data), "utf-8");
  return path;
}

function commonFlags(dataPath: string, opts: CommonOptions): string[] {
  const flags = ["--data", dataPath];
  if (opts.outputCol) flags.push("--output-col", opts.outputCol);
  if (opts.discrete?.length) flags.push("--discrete", opts.discrete.join(","));
  if (opts.continuous?.length) flags.push("--continuous", opts.continuous.join(","));
  return flags;
}

/** Run the full pipeline; returns the parsed report.json structure. */
export function explain(data: string | Columns, opts: ExplainOptions = {}): Report {
  return withTempDir((dir) => {
    const flags = commonFlags(materialize(data, dir), opts);
    if (opts.model) flags.push("--model", opts.model);
    if (opts.mode) flags.push("--mode", opts.mode);
    if (opts.bins !== undefined) flags.push("--bins", String(opts.bins));
    if (opts.nPrime !== undefined) flags.push("--n-prime", String(opts.nPrime));
    if (opts.lambda !== undefined) flags.push("--lambda", String(opts.lambda));
    if (opts.candidates !== undefined) flags.push("--candidates", String(opts.candidates));
    if (opts.divergence) flags.push("--divergence", opts.divergence);
    if (opts.epsilon !== undefined) flags.push("--epsilon", String(opts.epsilon));
    if (opts.seed !== undefined) flags.push("--seed", String(opts.seed));
    if (opts.threads !== undefined) flags.push("--threads", String(opts.threads));
    const outDir = join(dir, "out");
    runCli(["explain", ...flags, "--out-dir", outDir]);
    return JSON.parse(readFileSync(join(outDir, "report.json"), "utf-8")) as Report;
  });
}

/** Per-feature correlation-impact ratios against the output column. */
export function pcir(data: string | Columns, opts: CommonOptions = {}): PcirScore[] {
  return withTempDir((dir) => {
    const out = runCli(["pcir", ...commonFlags(materialize(data, dir), opts)]);
    return JSON.parse(out) as PcirScore[];
  });
}

export interface McirOptions extends CommonOptions {
  mode?: "pairwise" | "full";
  bins?: number;
}

/** Per-feature mutual correlation-impact ratios against the output column. */
export function mcir(data: string | Columns, opts: McirOptions = {}): McirScore[] {
  return withTempDir((dir) => {
    const flags = commonFlags(materialize(data, dir), opts);
    if (opts.mode) flags.push("--mode", opts.mode);
    if (opts.bins !== undefined) flags.push("--bins", String(opts.bins));
    return JSON.parse(runCli(["mcir", ...flags])) as McirScore[];
  });
}

export interface SynthResult {
  csvPath: string;
  truthPath: string;
  truth: Record<string, unknown>;
}

/**
 * Generate a canonical synthetic fixture.  Files are written under outDir
 * (caller-owned) or the current working directory.
 */
export function synth(
  preset: "xor" | "independent_k4" | "chain_dependent_k3",
  n: number,
  opts: { seed?: number; noise?: number; outDir?: string } = {},
): SynthResult {
  const dir = opts.outDir ?? process.cwd();
  const csvPath = join(dir, `${preset}-${n}.csv`);
  const args = ["synth", "--preset", preset, "--n", String(n), "--out", csvPath];
  if (opts.seed !== undefined) args.push("--seed", String(opts.seed));
  if (opts.noise !== undefined) args.push("--noise", String(opts.noise));
  runCli(args);
  const truthPath = csvPath.replace(/\.csv$/, ".truth.json");
  return {
    csvPath,
    truthPath,
    truth: JSON.parse(readFileSync(truthPath, "utf-8")) as Record<string, unknown>,
  };
}
