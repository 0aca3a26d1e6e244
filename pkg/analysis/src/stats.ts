/** Small statistics helpers shared by the analyses. */

export function mean(xs: number[]): number {
  if (xs.length === 0) return NaN;
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}

export function variance(xs: number[]): number {
  const m = mean(xs);
  return mean(xs.map((x) => (x - m) * (x - m)));
}

/** Midranks of a sample (ties share the average rank, 1-based). */
export function midranks(xs: number[]): number[] {
  const order = xs.map((x, i) => [x, i] as const).sort((a, b) => a[0] - b[0]);
  const ranks = new Array<number>(xs.length);
  let i = 0;
  while (i < order.length) {
    let j = i;
    while (j < order.length && order[j][0] === order[i][0]) j++;
    const avg = (i + 1 + j) / 2;
    for (let k = i; k < j; k++) ranks[order[k][1]] = avg;
    i = j;
  }
  return ranks;
}

/** Standard normal CDF via an erf approximation (|err| < 1.5e-7). */
export function normalCdf(z: number): number {
  const t = 1 / (1 + 0.2316419 * Math.abs(z));
  const d = 0.3989422804014327 * Math.exp((-z * z) / 2);
  let p = d * t * (0.319381530 + t * (-0.356563782 + t * (1.781477937 +
    t * (-1.821255978 + t * 1.330274429))));
  if (z > 0) p = 1 - p;
  return p;
}

/** Regularized incomplete beta, continued-fraction form. */
export function incompleteBeta(a: number, b: number, x: number): number {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const lbeta = logGamma(a) + logGamma(b) - logGamma(a + b);
  const front = Math.exp(a * Math.log(x) + b * Math.log(1 - x) - lbeta);
  // Lentz's algorithm
  const useDirect = x < (a + 1) / (a + b + 2);
  const [aa, bb, xx] = useDirect ? [a, b, x] : [b, a, 1 - x];
  let c = 1;
  let d = 1 - ((aa + bb) * xx) / (aa + 1);
  if (Math.abs(d) < 1e-30) d = 1e-30;
  d = 1 / d;
  let h = d;
  for (let m = 1; m < 300; m++) {
    const m2 = 2 * m;
    let num = (m * (bb - m) * xx) / ((aa + m2 - 1) * (aa + m2));
    d = 1 + num * d;
    if (Math.abs(d) < 1e-30) d = 1e-30;
    c = 1 + num / c;
    if (Math.abs(c) < 1e-30) c = 1e-30;
    d = 1 / d;
    h *= d * c;
    num = (-(aa + m) * (aa + bb + m) * xx) / ((aa + m2) * (aa + m2 + 1));
    d = 1 + num * d;
    if (Math.abs(d) < 1e-30) d = 1e-30;
    c = 1 + num / c;
    if (Math.abs(c) < 1e-30) c = 1e-30;
    d = 1 / d;
    const delta = d * c;
    h *= delta;
    if (Math.abs(delta - 1) < 1e-12) break;
  }
  const result = (front / aa) * h;
  return useDirect ? result : 1 - result;
}

export function logGamma(x: number): number {
  const g = [76.18009172947146, -86.50532032941677, 24.01409824083091,
    -1.231739572450155, 0.1208650973866179e-2, -0.5395239384953e-5];
  let ser = 1.000000000190015;
  const xx = x;
  let tmp = x + 5.5;
  tmp -= (xx + 0.5) * Math.log(tmp);
  for (let j = 0; j < 6; j++) ser += g[j] / (xx + 1 + j);
  return -tmp + Math.log((2.5066282746310005 * ser) / xx);
}

/** Two-sided p-value of a Student t statistic with df degrees of freedom. */
export function tTestPValue(t: number, df: number): number {
  if (!isFinite(t)) return 0;
  const x = df / (df + t * t);
  return incompleteBeta(df / 2, 0.5, x);
}

export interface Correlation {
  r: number;
  p: number;
  n: number;
}

/** Pearson correlation with a two-sided t-test p-value. */
export function pearson(xs: number[], ys: number[]): Correlation {
  const n = xs.length;
  if (n < 3) return { r: NaN, p: 1, n };
  const mx = mean(xs);
  const my = mean(ys);
  let sxy = 0;
  let sxx = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) ** 2;
    syy += (ys[i] - my) ** 2;
  }
  if (sxx === 0 || syy === 0) return { r: NaN, p: 1, n };
  const r = sxy / Math.sqrt(sxx * syy);
  const rc = Math.min(0.999999999999, Math.max(-0.999999999999, r));
  const t = rc * Math.sqrt((n - 2) / (1 - rc * rc));
  return { r, p: tTestPValue(t, n - 2), n };
}

export function median(xs: number[]): number {
  const s = [...xs].sort((a, b) => a - b);
  const mid = Math.floor(s.length / 2);
  return s.length % 2 ? s[mid] : (s[mid - 1] + s[mid]) / 2;
}

export interface BoxStats {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

export function boxStats(xs: number[]): BoxStats {
  const s = [...xs].sort((a, b) => a - b);
  const q = (f: number) => {
    const pos = f * (s.length - 1);
    const lo = Math.floor(pos);
    const hi = Math.ceil(pos);
    return s[lo] + (s[hi] - s[lo]) * (pos - lo);
  };
  return { min: s[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: s[s.length - 1] };
}
