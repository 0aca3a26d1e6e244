/** Random-forest regression with impurity-based feature importances.
 *
 * CART variance-reduction trees, grown to purity (no depth cap), bagged
 * over bootstrap samples; every feature is considered at every split.
 * Importances follow the usual convention: per-tree normalized impurity
 * decrease, averaged over the forest.
 */

import { seededRandom, shuffledIndices } from "./rng.js";
import { mean } from "./stats.js";

export interface ForestParams {
  nTrees?: number;       // default 100
  minSamplesLeaf?: number;
  minSamplesSplit?: number;
  seed?: number;
}

interface TreeNode {
  feature: number;
  threshold: number;
  left: TreeNode | null;
  right: TreeNode | null;
  value: number;
}

export interface Forest {
  predict(row: number[]): number;
  predictAll(X: number[][]): number[];
  importances: number[]; // per feature, sums to 1 (all zeros if no splits)
}

function buildTree(X: number[][], y: number[], indices: number[],
                   minLeaf: number, minSplit: number,
                   importance: number[]): TreeNode {
  const n = indices.length;
  let sum = 0;
  let sumSq = 0;
  for (const i of indices) {
    sum += y[i];
    sumSq += y[i] * y[i];
  }
  const nodeValue = sum / n;
  const nodeImpurity = sumSq / n - nodeValue * nodeValue;
  if (n < minSplit || nodeImpurity <= 1e-15) {
    return { feature: -1, threshold: 0, left: null, right: null, value: nodeValue };
  }

  const nFeatures = X[0].length;
  let bestGain = 0;
  let bestFeature = -1;
  let bestThreshold = 0;
  for (let f = 0; f < nFeatures; f++) {
    const order = [...indices].sort((a, b) => X[a][f] - X[b][f]);
    let leftSum = 0;
    let leftSq = 0;
    for (let pos = 0; pos < n - 1; pos++) {
      const i = order[pos];
      leftSum += y[i];
      leftSq += y[i] * y[i];
      const nl = pos + 1;
      const nr = n - nl;
      if (X[order[pos + 1]][f] === X[i][f]) continue; // no cut between equal values
      if (nl < minLeaf || nr < minLeaf) continue;
      const rightSum = sum - leftSum;
      const rightSq = sumSq - leftSq;
      const varL = leftSq / nl - (leftSum / nl) ** 2;
      const varR = rightSq / nr - (rightSum / nr) ** 2;
      const gain = nodeImpurity - (nl / n) * varL - (nr / n) * varR;
      if (gain > bestGain + 1e-15) {
        bestGain = gain;
        bestFeature = f;
        bestThreshold = (X[i][f] + X[order[pos + 1]][f]) / 2;
      }
    }
  }
  if (bestFeature < 0) {
    return { feature: -1, threshold: 0, left: null, right: null, value: nodeValue };
  }
  importance[bestFeature] += n * bestGain;
  const leftIdx = indices.filter((i) => X[i][bestFeature] <= bestThreshold);
  const rightIdx = indices.filter((i) => X[i][bestFeature] > bestThreshold);
  return {
    feature: bestFeature,
    threshold: bestThreshold,
    left: buildTree(X, y, leftIdx, minLeaf, minSplit, importance),
    right: buildTree(X, y, rightIdx, minLeaf, minSplit, importance),
    value: nodeValue,
  };
}

function predictTree(node: TreeNode, row: number[]): number {
  while (node.feature >= 0) {
    node = row[node.feature] <= node.threshold ? node.left! : node.right!;
  }
  return node.value;
}

export function trainForest(X: number[][], y: number[], params: ForestParams = {}): Forest {
  const nTrees = params.nTrees ?? 100;
  const minLeaf = params.minSamplesLeaf ?? 1;
  const minSplit = params.minSamplesSplit ?? 2;
  const rand = seededRandom(params.seed ?? 42);
  const n = X.length;
  if (n === 0) throw new Error("empty training set");
  const nFeatures = X[0].length;

  const trees: TreeNode[] = [];
  const importanceSum = new Array(nFeatures).fill(0);
  for (let t = 0; t < nTrees; t++) {
    const bootstrap = Array.from({ length: n }, () => Math.floor(rand() * n));
    const imp = new Array(nFeatures).fill(0);
    trees.push(buildTree(X, y, bootstrap, minLeaf, minSplit, imp));
    const total = imp.reduce((a, b) => a + b, 0);
    if (total > 0) {
      for (let f = 0; f < nFeatures; f++) importanceSum[f] += imp[f] / total;
    }
  }
  const impTotal = importanceSum.reduce((a, b) => a + b, 0);
  const importances = impTotal > 0
    ? importanceSum.map((v) => v / impTotal)
    : importanceSum.slice();

  const predict = (row: number[]) =>
    mean(trees.map((tree) => predictTree(tree, row)));
  return {
    predict,
    predictAll: (rows) => rows.map(predict),
    importances,
  };
}

export function rSquared(yTrue: number[], yPred: number[]): number {
  const m = mean(yTrue);
  let ssRes = 0;
  let ssTot = 0;
  for (let i = 0; i < yTrue.length; i++) {
    ssRes += (yTrue[i] - yPred[i]) ** 2;
    ssTot += (yTrue[i] - m) ** 2;
  }
  if (ssTot === 0) return ssRes === 0 ? 1 : 0;
  return 1 - ssRes / ssTot;
}

/** Mean out-of-fold R-squared over k folds (deterministic fold assignment). */
export function crossValR2(X: number[][], y: number[], params: ForestParams = {},
                           folds = 5): number {
  const n = X.length;
  if (n < folds) throw new Error(`need at least ${folds} rows`);
  const rand = seededRandom((params.seed ?? 42) ^ 0x5f0f);
  const order = shuffledIndices(n, rand);
  const scores: number[] = [];
  for (let f = 0; f < folds; f++) {
    const testIdx = order.filter((_, i) => i % folds === f);
    const trainIdx = order.filter((_, i) => i % folds !== f);
    const forest = trainForest(trainIdx.map((i) => X[i]), trainIdx.map((i) => y[i]),
                               { ...params, seed: (params.seed ?? 42) + f });
    const preds = forest.predictAll(testIdx.map((i) => X[i]));
    scores.push(rSquared(testIdx.map((i) => y[i]), preds));
  }
  return mean(scores);
}
