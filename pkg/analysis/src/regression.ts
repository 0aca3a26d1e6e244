/** Fairness-vs-structure regression: how much of a fairness metric is
 * explained by the structural measures, and how much by assortativity alone. */

import { Corpus, CorpusRow, MEASURE_COLUMNS, filterModel, numeric, requireColumns } from "./csv.js";
import { crossValR2, trainForest } from "./randomForest.js";

export type FairnessTarget = "SP" | "EO";

const TARGET_COLUMN: Record<FairnessTarget, string> = { SP: "sp10", EO: "eo10" };

export interface RegressionResult {
  target: FairnessTarget;
  modelId: string;
  r2: number;                      // mean 5-fold CV score
  importances: Record<string, number>;
  assortativityShare: number;      // percent of full R2 reached by assortativity alone
  rowsUsed: number;
}

export function designMatrix(rows: CorpusRow[], targetColumn: string):
    { X: number[][]; y: number[] } {
  const X: number[][] = [];
  const y: number[] = [];
  for (const row of rows) {
    const target = numeric(row, targetColumn);
    if (target === null) continue;
    const feats = MEASURE_COLUMNS.map((c) => numeric(row, c));
    if (feats.some((v) => v === null)) continue;
    X.push(feats as number[]);
    y.push(target);
  }
  return { X, y };
}

export function rq1Regression(corpus: Corpus, modelId: string,
                              target: FairnessTarget, seed = 42,
                              nTrees = 100): RegressionResult {
  requireColumns(corpus, [...MEASURE_COLUMNS, TARGET_COLUMN[target], "model"]);
  const rows = filterModel(corpus, modelId);
  const { X, y } = designMatrix(rows, TARGET_COLUMN[target]);
  if (X.length < 50) {
    throw new Error(`need at least 50 usable rows for model ${modelId}, got ${X.length}`);
  }
  const params = { nTrees, seed };
  const r2 = crossValR2(X, y, params);
  const forest = trainForest(X, y, params);
  const importances: Record<string, number> = {};
  MEASURE_COLUMNS.forEach((c, i) => (importances[c] = forest.importances[i]));

  const aIdx = MEASURE_COLUMNS.indexOf("assortativity");
  const xAssort = X.map((row) => [row[aIdx]]);
  const r2Assort = crossValR2(xAssort, y, params);
  let share = 0;
  if (r2 > 0 && r2Assort > 0) {
    share = Math.min(100, (100 * r2Assort) / r2);
  }
  return { target, modelId, r2, importances, assortativityShare: share, rowsUsed: X.length };
}

export function topImportance(result: RegressionResult): string {
  return Object.entries(result.importances)
    .sort((a, b) => b[1] - a[1])[0][0];
}
