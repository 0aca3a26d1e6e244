/** Corpus CSV reader.
 *
 * The corpus format is plain comma-separated cells with no quoting (flag
 * cells use ';' and '=' separators), so a simple split is exact.
 */

import { readFileSync } from "node:fs";

export const MEASURE_COLUMNS = [
  "closeness", "betweenness", "prestige", "degree", "constraint",
  "density", "heterogeneity", "isolation", "diameter", "control",
  "assortativity", "avg_mixed_dist", "power_exp", "info_unfairness",
] as const;

export const METRIC_COLUMNS = ["hit10", "ap10", "auc", "sp10", "eo10"] as const;

export type CorpusRow = Record<string, string>;

export interface Corpus {
  header: string[];
  rows: CorpusRow[];
}

export function parseCorpus(text: string): Corpus {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) throw new Error("empty corpus");
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${i + 2}: expected ${header.length} cells, got ${cells.length}`);
    }
    const row: CorpusRow = {};
    header.forEach((name, j) => (row[name] = cells[j]));
    return row;
  });
  return { header, rows };
}

export function loadCorpus(path: string): Corpus {
  return parseCorpus(readFileSync(path, "utf-8"));
}

export function requireColumns(corpus: Corpus, names: readonly string[]): void {
  const missing = names.filter((n) => !corpus.header.includes(n));
  if (missing.length) throw new Error(`corpus is missing columns: ${missing.join(", ")}`);
}

/** Numeric column values for a row subset; rows with empty cells are skipped
 * by the caller via `numeric`. */
export function numeric(row: CorpusRow, column: string): number | null {
  const cell = row[column];
  if (cell === undefined || cell === "") return null;
  const v = Number(cell);
  return Number.isFinite(v) ? v : null;
}

export function filterModel(corpus: Corpus, modelId: string): CorpusRow[] {
  return corpus.rows.filter((r) => r["model"] === modelId);
}
