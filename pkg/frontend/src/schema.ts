/**
 * Readers for the experiment output formats. The schemas are fixed by the
 * producer (curves.csv, fits.json, bounds.csv); parse errors carry the line
 * number of the offending row.
 */

import { readFileSync } from "node:fs";

export interface CurvePoint {
  N: number;
  field: string;
  mean: number;
  stderr: number;
  count: number;
}

export interface FitResult {
  p: number;
  a: number;
  b: number;
  residual_norm: number;
  plan_digest: string;
}

export interface BoundPoint {
  N: number;
  value: number;
}

export class SchemaError extends Error {
  constructor(message: string, readonly path: string, readonly line?: number) {
    super(line === undefined ? `${path}: ${message}` : `${path}:${line}: ${message}`);
  }
}

const CURVE_HEADER = "N,field,mean,stderr,count";
const BOUND_HEADER = "N,value";

function numberOrThrow(token: string, what: string, path: string, line: number): number {
  const v = token === "inf" ? Infinity : Number(token);
  if (token.trim() === "" || Number.isNaN(v)) {
    throw new SchemaError(`bad ${what} value ${JSON.stringify(token)}`, path, line);
  }
  return v;
}

export function parseCurvesCsv(text: string, path = "<curves>"): CurvePoint[] {
  const lines = text.split(/\r?\n/);
  if ((lines[0] ?? "").trim() !== CURVE_HEADER) {
    throw new SchemaError(`expected header ${JSON.stringify(CURVE_HEADER)}`, path, 1);
  }
  const out: CurvePoint[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const parts = line.split(",");
    if (parts.length !== 5) {
      throw new SchemaError(`expected 5 columns, got ${parts.length}`, path, i + 1);
    }
    out.push({
      N: numberOrThrow(parts[0], "N", path, i + 1),
      field: parts[1],
      mean: numberOrThrow(parts[2], "mean", path, i + 1),
      stderr: numberOrThrow(parts[3], "stderr", path, i + 1),
      count: numberOrThrow(parts[4], "count", path, i + 1),
    });
  }
  if (out.length === 0) throw new SchemaError("no data rows", path);
  return out;
}

export function parseBoundsCsv(text: string, path = "<bounds>"): BoundPoint[] {
  const lines = text.split(/\r?\n/);
  if ((lines[0] ?? "").trim() !== BOUND_HEADER) {
    throw new SchemaError(`expected header ${JSON.stringify(BOUND_HEADER)}`, path, 1);
  }
  const out: BoundPoint[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const parts = line.split(",");
    if (parts.length !== 2) {
      throw new SchemaError(`expected 2 columns, got ${parts.length}`, path, i + 1);
    }
    out.push({
      N: numberOrThrow(parts[0], "N", path, i + 1),
      value: numberOrThrow(parts[1], "value", path, i + 1),
    });
  }
  if (out.length === 0) throw new SchemaError("no data rows", path);
  return out;
}

export function parseFitJson(text: string, path = "<fits>"): FitResult {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`invalid JSON: ${(err as Error).message}`, path);
  }
  const obj = data as Record<string, unknown>;
  for (const key of ["p", "a", "b", "residual_norm"]) {
    if (typeof obj[key] !== "number") {
      throw new SchemaError(`missing numeric field ${JSON.stringify(key)}`, path);
    }
  }
  return {
    p: obj.p as number,
    a: obj.a as number,
    b: obj.b as number,
    residual_norm: obj.residual_norm as number,
    plan_digest: typeof obj.plan_digest === "string" ? obj.plan_digest : "",
  };
}

export function loadCurves(path: string, field?: string): CurvePoint[] {
  const all = parseCurvesCsv(readFileSync(path, "utf8"), path);
  const wanted = field ?? "tau_l2";
  const rows = all.filter((pt) => pt.field === wanted);
  if (rows.length === 0) {
    throw new SchemaError(`no rows with field ${JSON.stringify(wanted)}`, path);
  }
  return rows.sort((u, v) => u.N - v.N);
}

export function loadBounds(path: string): BoundPoint[] {
  return parseBoundsCsv(readFileSync(path, "utf8"), path).sort((u, v) => u.N - v.N);
}

export function loadFit(path: string): FitResult {
  return parseFitJson(readFileSync(path, "utf8"), path);
}
