/** SVG figure generation straight from the corpus: parameter-grid heatmaps,
 * per-model metric box plots, and a significance-masked correlation matrix. */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { Corpus, CorpusRow, MEASURE_COLUMNS, METRIC_COLUMNS, numeric, requireColumns } from "./csv.js";
import { boxStats, mean, pearson } from "./stats.js";

const CELL = 46;
const PAD = 70;

function color(t: number): string {
  // blue (low) -> white -> red (high)
  const clamped = Math.max(0, Math.min(1, t));
  const r = Math.round(255 * Math.min(1, 2 * clamped));
  const b = Math.round(255 * Math.min(1, 2 * (1 - clamped)));
  const g = Math.round(255 * (1 - Math.abs(2 * clamped - 1)));
  return `rgb(${r},${g},${b})`;
}

function svgDoc(width: number, height: number, body: string): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `font-family="sans-serif" font-size="11">\n${body}</svg>\n`;
}

export function gridHeatmapSvg(corpus: Corpus, column: string): string {
  requireColumns(corpus, ["alpha", "beta", column]);
  const alphas = [...new Set(corpus.rows.map((r) => r["alpha"]))].sort(
    (a, b) => Number(a) - Number(b));
  const betas = [...new Set(corpus.rows.map((r) => r["beta"]))].sort(
    (a, b) => Number(a) - Number(b));
  const cells: { a: number; b: number; v: number }[] = [];
  for (let ai = 0; ai < alphas.length; ai++) {
    for (let bi = 0; bi < betas.length; bi++) {
      const vals = corpus.rows
        .filter((r) => r["alpha"] === alphas[ai] && r["beta"] === betas[bi])
        .map((r) => numeric(r, column))
        .filter((v): v is number => v !== null);
      if (vals.length) cells.push({ a: ai, b: bi, v: mean(vals) });
    }
  }
  const values = cells.map((c) => c.v);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const range = hi - lo; // zero range -> flat mid color
  let body = `<text x="${PAD}" y="20" font-size="14">${column} over (alpha, beta)</text>\n`;
  for (const c of cells) {
    const x = PAD + c.b * CELL;
    const y = PAD + c.a * CELL;
    const t = range === 0 ? 0.5 : (c.v - lo) / range;
    body += `<rect x="${x}" y="${y}" width="${CELL - 2}" height="${CELL - 2}" fill="${color(t)}"/>\n`;
    body += `<text x="${x + 3}" y="${y + CELL / 2}" font-size="9">${c.v.toFixed(2)}</text>\n`;
  }
  betas.forEach((b, bi) => {
    body += `<text x="${PAD + bi * CELL + 8}" y="${PAD - 8}">β=${b}</text>\n`;
  });
  alphas.forEach((a, ai) => {
    body += `<text x="${8}" y="${PAD + ai * CELL + CELL / 2}">α=${a}</text>\n`;
  });
  return svgDoc(PAD + betas.length * CELL + 30, PAD + alphas.length * CELL + 30, body);
}

export function boxPlotSvg(corpus: Corpus, metric: string): string {
  requireColumns(corpus, ["model", metric]);
  const models = [...new Set(corpus.rows.map((r) => r["model"]))].sort();
  const width = PAD + models.length * 90 + 30;
  const height = 320;
  const top = 50;
  const plotH = 220;
  const all = corpus.rows.map((r) => numeric(r, metric)).filter((v): v is number => v !== null);
  if (all.length === 0) throw new Error(`no values for ${metric}`);
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const scale = (v: number) =>
    top + plotH - (hi === lo ? plotH / 2 : ((v - lo) / (hi - lo)) * plotH);
  let body = `<text x="${PAD}" y="20" font-size="14">${metric} by model</text>\n`;
  models.forEach((m, i) => {
    const vals = corpus.rows.filter((r) => r["model"] === m)
      .map((r) => numeric(r, metric)).filter((v): v is number => v !== null);
    if (!vals.length) return;
    const st = boxStats(vals);
    const cx = PAD + i * 90 + 30;
    const w = 36;
    body += `<line x1="${cx}" y1="${scale(st.min)}" x2="${cx}" y2="${scale(st.max)}" stroke="black"/>\n`;
    body += `<rect x="${cx - w / 2}" y="${scale(st.q3)}" width="${w}" ` +
      `height="${Math.max(1, scale(st.q1) - scale(st.q3))}" fill="#9ecae1" stroke="black"/>\n`;
    body += `<line x1="${cx - w / 2}" y1="${scale(st.median)}" x2="${cx + w / 2}" ` +
      `y2="${scale(st.median)}" stroke="black" stroke-width="2"/>\n`;
    body += `<text x="${cx - w / 2}" y="${top + plotH + 20}">${m}</text>\n`;
  });
  body += `<text x="10" y="${scale(hi)}">${hi.toFixed(3)}</text>\n`;
  body += `<text x="10" y="${scale(lo)}">${lo.toFixed(3)}</text>\n`;
  return svgDoc(width, height, body);
}

export function correlationHeatmapSvg(corpus: Corpus, pThreshold = 0.01): string {
  requireColumns(corpus, MEASURE_COLUMNS);
  const cols = MEASURE_COLUMNS;
  const series: number[][] = [];
  // one value per graph: bias columns repeat across splits, so dedupe by graph
  const seen = new Set<string>();
  for (const row of corpus.rows) {
    const key = `${row["alpha"]}|${row["beta"]}|${row["repeat"]}|${row["graph_seed"]}`;
    if (seen.has(key)) continue;
    seen.add(key);
    const vals = cols.map((c) => numeric(row, c));
    if (vals.some((v) => v === null)) continue;
    series.push(vals as number[]);
  }
  const cell = 34;
  const pad = 110;
  let body = `<text x="${pad}" y="18" font-size="14">measure correlations ` +
    `(blank: p ≥ ${pThreshold})</text>\n`;
  for (let i = 0; i < cols.length; i++) {
    for (let j = 0; j < cols.length; j++) {
      const xs = series.map((s) => s[i]);
      const ys = series.map((s) => s[j]);
      const { r, p } = i === j ? { r: 1, p: 0 } : pearson(xs, ys);
      const x = pad + j * cell;
      const y = pad + i * cell;
      const masked = !(p < pThreshold) || Number.isNaN(r);
      const fill = masked ? "#dddddd" : color((r + 1) / 2);
      body += `<rect x="${x}" y="${y}" width="${cell - 1}" height="${cell - 1}" fill="${fill}"/>\n`;
      if (!masked) {
        body += `<text x="${x + 2}" y="${y + cell / 2 + 3}" font-size="8">${r.toFixed(2)}</text>\n`;
      }
    }
  }
  cols.forEach((c, i) => {
    body += `<text x="4" y="${pad + i * cell + cell / 2}" font-size="9">${c}</text>\n`;
    body += `<text x="${pad + i * cell + 4}" y="${pad - 6}" font-size="9" ` +
      `transform="rotate(-45 ${pad + i * cell + 4} ${pad - 6})">${c}</text>\n`;
  });
  return svgDoc(pad + cols.length * cell + 30, pad + cols.length * cell + 30, body);
}

export interface FigureManifest {
  files: string[];
}

export function writeFigures(corpus: Corpus, outDir: string): FigureManifest {
  mkdirSync(outDir, { recursive: true });
  const files: string[] = [];
  const emit = (name: string, svg: string) => {
    const path = join(outDir, name);
    writeFileSync(path, svg);
    files.push(path);
  };
  for (const column of [...MEASURE_COLUMNS, ...METRIC_COLUMNS]) {
    if (!corpus.header.includes(column)) continue;
    emit(`heatmap_${column}.svg`, gridHeatmapSvg(corpus, column));
  }
  for (const metric of ["eo10", "sp10", "hit10", "auc"]) {
    if (!corpus.header.includes(metric)) continue;
    emit(`boxplot_${metric}.svg`, boxPlotSvg(corpus, metric));
  }
  emit("correlations.svg", correlationHeatmapSvg(corpus));
  return { files };
}
