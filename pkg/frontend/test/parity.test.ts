import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, describe, expect, it } from "vitest";

import {
  DegenerateInformationError,
  InputError,
  type Report,
  columnsToCsv,
  explain,
  mcir,
  pcir,
  synth,
} from "../dist/index.js";

const python = process.env.EXCIR_PY ?? "python3";
const scratch = mkdtempSync(join(tmpdir(), "excir-parity-"));

afterAll(() => rmSync(scratch, { recursive: true, force: true }));

/** Reference path: invoke the CLI directly and parse report.json ourselves. */
function cliExplain(dataPath: string, extra: string[]): Report {
  const outDir = mkdtempSync(join(scratch, "cli-"));
  const res = spawnSync(
    python,
    [
      "-m",
      "excir.cli",
      "explain",
      "--data",
      dataPath,
      "--output-col",
      "y",
      ...extra,
      "--out-dir",
      outDir,
    ],
    { encoding: "utf-8" },
  );
  expect(res.status, res.stderr).toBe(0);
  return JSON.parse(readFileSync(join(outDir, "report.json"), "utf-8")) as Report;
}

interface Fixture {
  name: string;
  csvPath: string;
  bindingOpts: Parameters<typeof explain>[1];
  cliFlags: string[];
}

function fixtures(): Fixture[] {
  const xor = synth("xor", 16, { outDir: scratch });
  const k4 = synth("independent_k4", 200, { seed: 5, outDir: scratch });
  const chain = synth("chain_dependent_k3", 120, { seed: 2, noise: 0.1, outDir: scratch });
  return [
    {
      name: "xor full",
      csvPath: xor.csvPath,
      bindingOpts: { outputCol: "y", mode: "full", bins: 2, seed: 0 },
      cliFlags: ["--mode", "full", "--bins", "2", "--seed", "0"],
    },
    {
      name: "independent_k4 pairwise",
      csvPath: k4.csvPath,
      bindingOpts: { outputCol: "y", mode: "pairwise", bins: 8, nPrime: 64, seed: 11 },
      cliFlags: ["--mode", "pairwise", "--bins", "8", "--n-prime", "64", "--seed", "11"],
    },
    {
      name: "independent_k4 independent",
      csvPath: k4.csvPath,
      bindingOpts: { outputCol: "y", mode: "independent", seed: 7 },
      cliFlags: ["--mode", "independent", "--seed", "7"],
    },
    {
      name: "chain_dependent_k3 full",
      csvPath: chain.csvPath,
      bindingOpts: { outputCol: "y", mode: "full", bins: 4, seed: 3 },
      cliFlags: ["--mode", "full", "--bins", "4", "--seed", "3"],
    },
  ];
}

describe("explain parity with the CLI (acceptance criterion 12)", () => {
  for (const fixture of fixtures()) {
    it(`matches report.json bit-for-bit: ${fixture.name}`, () => {
      const viaBindings = explain(fixture.csvPath, fixture.bindingOpts);
      const viaCli = cliExplain(fixture.csvPath, fixture.cliFlags);
      // toStrictEqual compares every field and every float bit pattern
      expect(viaBindings).toStrictEqual(viaCli);
    });
  }

  it("xor full mode carries the analytic values", () => {
    const { csvPath } = synth("xor", 4, { outDir: scratch });
    const report = explain(csvPath, { outputCol: "y", mode: "full", bins: 2 });
    expect(report.features.map((f) => f.mcir)).toStrictEqual([0.5, 0.5]);
    expect(report.globals.jmi_bits).toBe(1);
    expect(report.globals.joint_mutual_impact).toBe(0.5);
  });

  it("independent mode omits the dependence scores", () => {
    const { csvPath } = synth("xor", 8, { outDir: scratch });
    const report = explain(csvPath, { outputCol: "y", mode: "independent" });
    for (const feature of report.features) {
      expect(feature).not.toHaveProperty("mcir");
      expect(feature).not.toHaveProperty("cmmi_bits");
      expect(feature.pcir).toBeGreaterThanOrEqual(0);
    }
  });

  it("accepts a columns object and matches the equivalent CSV file", () => {
    const columns = {
      f1: [0, 0, 1, 1, 0, 0, 1, 1],
      f2: [0, 1, 0, 1, 0, 1, 0, 1],
      y: [0, 1, 1, 0, 0, 1, 1, 0],
    };
    const viaObject = explain(columns, { outputCol: "y", mode: "full", bins: 2 });
    const csvPath = join(scratch, "manual.csv");
    const csv = columnsToCsv(columns);
    expect(csv.startsWith("f1,f2,y\n")).toBe(true);
    spawnSync("sh", ["-c", `cat > ${JSON.stringify(csvPath)}`], { input: csv });
    const viaFile = cliExplain(csvPath, ["--mode", "full", "--bins", "2"]);
    expect(viaObject).toStrictEqual(viaFile);
  });
});

describe("error mapping mirrors the CLI exit classes", () => {
  it("missing file raises InputError", () => {
    expect(() => explain(join(scratch, "missing.csv"), { outputCol: "y" })).toThrow(
      InputError,
    );
  });

  it("degenerate information raises DegenerateInformationError", () => {
    const rows: number[][] = [];
    for (const a of [0, 1]) for (const b of [0, 1]) for (const y of [0, 1]) rows.push([a, b, y]);
    const columns = {
      f1: rows.map((r) => r[0]),
      f2: rows.map((r) => r[1]),
      y: rows.map((r) => r[2]),
    };
    expect(() => explain(columns, { outputCol: "y", mode: "full" })).toThrow(
      DegenerateInformationError,
    );
  });
});

describe("score helpers", () => {
  it("pcir returns one ratio per feature in [0, 1]", () => {
    const { csvPath } = synth("independent_k4", 100, { seed: 1, outDir: scratch });
    const scores = pcir(csvPath, { outputCol: "y" });
    expect(scores).toHaveLength(4);
    for (const s of scores) {
      expect(s.pcir).toBeGreaterThanOrEqual(0);
      expect(s.pcir).toBeLessThanOrEqual(1);
    }
  });

  it("mcir on xor gives the analytic 0.5 split", () => {
    const { csvPath } = synth("xor", 4, { outDir: scratch });
    const scores = mcir(csvPath, { outputCol: "y", mode: "full", bins: 2 });
    expect(scores.map((s) => s.mcir)).toStrictEqual([0.5, 0.5]);
    for (const s of scores) {
      expect(s.mcir + s.joint_mutual_impact).toBe(1);
    }
  });
});
