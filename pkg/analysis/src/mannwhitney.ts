/** Mann-Whitney U test: exact enumeration for small samples, normal
 * approximation with tie correction above. */

import { midranks, normalCdf } from "./stats.js";

export interface MwuResult {
  u1: number;
  u2: number;
  p: number;
  method: "exact" | "normal";
}

export const EXACT_LIMIT = 8;

/** U statistics from midranks of the pooled sample. */
export function uStatistics(x: number[], y: number[]): { u1: number; u2: number } {
  const n1 = x.length;
  const n2 = y.length;
  const ranks = midranks([...x, ...y]);
  let r1 = 0;
  for (let i = 0; i < n1; i++) r1 += ranks[i];
  const u1 = r1 - (n1 * (n1 + 1)) / 2;
  return { u1, u2: n1 * n2 - u1 };
}

/** Exact two-sided p: enumerate every assignment of pooled ranks to group 1. */
export function exactPValue(x: number[], y: number[]): number {
  const n1 = x.length;
  const n2 = y.length;
  const n = n1 + n2;
  const ranks = midranks([...x, ...y]);
  const { u1 } = uStatistics(x, y);
  const offset = (n1 * (n1 + 1)) / 2;
  let le = 0;
  let ge = 0;
  let total = 0;
  const tol = 1e-9;
  const chosen: number[] = [];

  const visit = (start: number, picked: number, rankSum: number) => {
    if (picked === n1) {
      const u = rankSum - offset;
      total++;
      if (u <= u1 + tol) le++;
      if (u >= u1 - tol) ge++;
      return;
    }
    for (let i = start; i <= n - (n1 - picked); i++) {
      chosen.push(i);
      visit(i + 1, picked + 1, rankSum + ranks[i]);
      chosen.pop();
    }
  };
  visit(0, 0, 0);
  return Math.min(1, (2 * Math.min(le, ge)) / total);
}

/** Normal approximation with tie correction and continuity correction. */
export function normalPValue(x: number[], y: number[]): number {
  const n1 = x.length;
  const n2 = y.length;
  const n = n1 + n2;
  const { u1 } = uStatistics(x, y);
  const mu = (n1 * n2) / 2;
  // tie correction over pooled value multiplicities
  const counts = new Map<number, number>();
  for (const v of [...x, ...y]) counts.set(v, (counts.get(v) ?? 0) + 1);
  let tieSum = 0;
  for (const t of counts.values()) tieSum += t * t * t - t;
  const sigma2 = ((n1 * n2) / 12) * (n + 1 - tieSum / (n * (n - 1)));
  if (sigma2 <= 0) return 1;
  const sigma = Math.sqrt(sigma2);
  const z = (Math.abs(u1 - mu) - 0.5) / sigma;
  return Math.min(1, 2 * (1 - normalCdf(Math.max(0, z))));
}

export function mannWhitney(x: number[], y: number[]): MwuResult {
  if (x.length === 0 || y.length === 0) {
    throw new Error("mannWhitney requires non-empty samples");
  }
  const { u1, u2 } = uStatistics(x, y);
  if (x.length <= EXACT_LIMIT && y.length <= EXACT_LIMIT) {
    return { u1, u2, p: exactPValue(x, y), method: "exact" };
  }
  return { u1, u2, p: normalPValue(x, y), method: "normal" };
}
