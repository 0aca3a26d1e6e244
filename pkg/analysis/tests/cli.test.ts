import { existsSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, test } from "vitest";

import { MEASURE_COLUMNS, METRIC_COLUMNS } from "../src/csv.js";
import { main } from "../src/cli.js";
import { seededRandom } from "../src/rng.js";

const HEADER = ["use_case", "n", "alpha", "beta", "repeat", "graph_seed", "split_id",
  "model", ...MEASURE_COLUMNS, ...METRIC_COLUMNS, "flags"].join(",");

function writeCorpus(dir: string): string {
  const rand = seededRandom(12);
  const lines = [HEADER];
  let g = 0;
  for (const alpha of ["0.5", "0.7"]) {
    for (const beta of ["0.0", "1.0", "2.0"]) {
      for (let rep = 0; rep < 10; rep++) {
        const assort = Number(beta) * 0.2 + rand() * 0.05;
        const sp = assort * 0.5 + rand() * 0.02;
        for (let split = 0; split < 2; split++) {
          const bias = MEASURE_COLUMNS.map((c) =>
            c === "assortativity" ? assort.toFixed(6) : rand().toFixed(6));
          const metrics = METRIC_COLUMNS.map((c) =>
            c === "sp10" || c === "eo10" ? sp.toFixed(6) : (0.5 + rand() * 0.1).toFixed(6));
          lines.push(["opinion", "500", alpha, beta, String(rep), String(g), String(split),
            "svd", ...bias, ...metrics, ""].join(","));
        }
        g++;
      }
    }
  }
  const path = join(dir, "corpus.csv");
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

describe("cli", () => {
  test("all: runs rq1 + rq3 + figures against a corpus", () => {
    const dir = mkdtempSync(join(tmpdir(), "cli-"));
    const corpus = writeCorpus(dir);
    const out = join(dir, "out");
    const code = main(["all", "--corpus", corpus, "--model", "svd",
      "--target", "SP", "--out-dir", out]);
    expect(code).toBe(0);
    expect(existsSync(join(out, "rq1_svd_SP.csv"))).toBe(true);
    expect(existsSync(join(out, "rq3_svd.csv"))).toBe(true);
    expect(existsSync(join(out, "correlations.svg"))).toBe(true);
  }, 120_000);

  test("rejects unknown commands and missing corpus", () => {
    expect(main(["frobnicate"])).toBe(2);
    expect(main(["rq1"])).toBe(2);
    expect(main(["rq1", "--corpus", "/nonexistent.csv"])).toBe(1);
  });
});
