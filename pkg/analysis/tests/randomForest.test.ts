import { describe, expect, test } from "vitest";

import { crossValR2, rSquared, trainForest } from "../src/randomForest.js";
import { seededRandom } from "../src/rng.js";

function syntheticFeatures(n: number, f: number, seed: number): number[][] {
  const rand = seededRandom(seed);
  return Array.from({ length: n }, () => Array.from({ length: f }, () => rand()));
}

describe("random forest regression", () => {
  test("perfect predictor: target equals one feature", () => {
    const X = syntheticFeatures(300, 6, 1);
    const y = X.map((row) => row[3]);
    const r2 = crossValR2(X, y, { nTrees: 50, seed: 7 });
    expect(r2).toBeGreaterThan(0.9);
    const forest = trainForest(X, y, { nTrees: 50, seed: 7 });
    expect(forest.importances[3]).toBeGreaterThan(0.9);
  }, 60_000);

  test("pure noise target: held-out R2 stays near zero", () => {
    const X = syntheticFeatures(200, 5, 2);
    const rand = seededRandom(99);
    const y = X.map(() => rand());
    const r2 = crossValR2(X, y, { nTrees: 30, seed: 3 });
    expect(r2).toBeLessThanOrEqual(0.1);
  }, 60_000);

  test("importances are nonnegative and sum to 1", () => {
    const X = syntheticFeatures(150, 4, 5);
    const y = X.map((row) => 2 * row[0] + row[1]);
    const forest = trainForest(X, y, { nTrees: 40, seed: 11 });
    for (const v of forest.importances) expect(v).toBeGreaterThanOrEqual(0);
    const total = forest.importances.reduce((a, b) => a + b, 0);
    expect(Math.abs(total - 1)).toBeLessThan(1e-9);
  }, 60_000);

  test("deterministic under a fixed seed", () => {
    const X = syntheticFeatures(80, 3, 8);
    const y = X.map((row) => row[0] - row[2]);
    const a = trainForest(X, y, { nTrees: 10, seed: 21 });
    const b = trainForest(X, y, { nTrees: 10, seed: 21 });
    expect(a.importances).toEqual(b.importances);
    expect(a.predictAll(X.slice(0, 5))).toEqual(b.predictAll(X.slice(0, 5)));
  });

  test("rSquared basics", () => {
    expect(rSquared([1, 2, 3], [1, 2, 3])).toBe(1);
    expect(rSquared([1, 2, 3], [2, 2, 2])).toBe(0);
  });
});
