import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, test } from "vitest";

import { MEASURE_COLUMNS, METRIC_COLUMNS, parseCorpus } from "../src/csv.js";
import { boxPlotSvg, correlationHeatmapSvg, gridHeatmapSvg, writeFigures } from "../src/figures.js";
import { pearson } from "../src/stats.js";

const HEADER = ["use_case", "n", "alpha", "beta", "repeat", "graph_seed", "split_id",
  "model", ...MEASURE_COLUMNS, ...METRIC_COLUMNS, "flags"].join(",");

function row(alpha: string, beta: string, graph: number, value: number): string {
  const bias = MEASURE_COLUMNS.map((_, i) => (value + i * 0.1).toFixed(4));
  const metrics = METRIC_COLUMNS.map(() => value.toFixed(4));
  return ["opinion", "500", alpha, beta, "0", String(graph), "0", "svd",
    ...bias, ...metrics, ""].join(",");
}

describe("figures", () => {
  test("single-cell corpus renders a 1x1 heatmap with the column mean", () => {
    const corpus = parseCorpus([HEADER, row("0.5", "1.0", 1, 0.25),
      row("0.5", "1.0", 2, 0.75)].join("\n") + "\n");
    const svg = gridHeatmapSvg(corpus, "hit10");
    expect(svg).toContain("<svg");
    expect(svg).toContain("0.50");  // mean of 0.25 and 0.75
    expect((svg.match(/<rect/g) ?? []).length).toBe(1);
  });

  test("constant column renders without error", () => {
    const corpus = parseCorpus([HEADER, row("0.5", "0.0", 1, 0.4),
      row("0.7", "1.0", 2, 0.4)].join("\n") + "\n");
    expect(gridHeatmapSvg(corpus, "sp10")).toContain("<svg");
    expect(boxPlotSvg(corpus, "sp10")).toContain("<svg");
  });

  test("correlation of a column with itself is 1 on the diagonal", () => {
    const rows = Array.from({ length: 30 }, (_, i) => row("0.5", "0.0", i, i / 30));
    const corpus = parseCorpus([HEADER, ...rows].join("\n") + "\n");
    const svg = correlationHeatmapSvg(corpus);
    expect(svg).toContain("1.00");
    const xs = Array.from({ length: 20 }, (_, i) => i + 1);
    expect(pearson(xs, xs).r).toBeCloseTo(1, 12);
  });

  test("writeFigures emits heatmaps, box plots, and the correlation matrix", () => {
    const rows: string[] = [];
    let g = 0;
    for (const alpha of ["0.5", "0.7"]) {
      for (const beta of ["0.0", "1.0"]) {
        for (let r = 0; r < 3; r++) rows.push(row(alpha, beta, g++, (g % 7) / 7));
      }
    }
    const corpus = parseCorpus([HEADER, ...rows].join("\n") + "\n");
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const manifest = writeFigures(corpus, dir);
    expect(manifest.files.length).toBeGreaterThan(15);
    for (const f of manifest.files) {
      expect(existsSync(f)).toBe(true);
      expect(readFileSync(f, "utf-8")).toContain("</svg>");
    }
  });

  test("missing column is named in the error", () => {
    const corpus = parseCorpus([HEADER, row("0.5", "0.0", 1, 0.1)].join("\n") + "\n");
    expect(() => gridHeatmapSvg(corpus, "nope")).toThrow(/nope/);
  });
});
