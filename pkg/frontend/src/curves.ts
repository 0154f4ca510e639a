/** Overlay curve evaluation: reference power/log curves and growth fits. */

import type { FitResult } from "./schema.js";

export interface ReferenceCurve {
  coefficient: number;
  exponent: number;
  /** false: coefficient * N^exponent; true: coefficient * log(1+N)^exponent */
  log_flag: boolean;
  /** additive constant, e.g. the 28.5 in 6 log^{1/2}(1+N) + 28.5 */
  offset?: number;
}

export function referenceValue(curve: ReferenceCurve, n: number): number {
  const base = curve.log_flag ? Math.log(1 + n) : n;
  return curve.coefficient * Math.pow(base, curve.exponent) + (curve.offset ?? 0);
}

/** Fitted growth model a N^p log N + b N^p from fits.json. */
export function fitValue(fit: FitResult, n: number): number {
  return fit.a * Math.pow(n, fit.p) * Math.log(n) + fit.b * Math.pow(n, fit.p);
}

export function sampleCurve(f: (n: number) => number, nMin: number, nMax: number, points = 200): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  for (let i = 0; i < points; i++) {
    const n = nMin + ((nMax - nMin) * i) / (points - 1);
    out.push([n, f(n)]);
  }
  return out;
}
