/**
 * Figure assembly from a plot spec: sample-mean points with error bars,
 * optional bound overlay (values come from a bounds dump, never recomputed
 * here), optional reference curve and fitted growth curve.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { fitValue, referenceValue, sampleCurve, type ReferenceCurve } from "./curves.js";
import { loadBounds, loadCurves, loadFit, SchemaError } from "./schema.js";
import { Figure } from "./svg.js";

export interface PlotSpec {
  curve_path: string;
  field?: "tau_l2" | "tau_w";
  fit_path?: string;
  bound_overlay?: "none" | "theorem1";
  bound_path?: string;
  reference_curve?: ReferenceCurve;
  output_path: string;
  title?: string;
  width?: number;
  height?: number;
}

export function parseSpec(text: string, path = "<spec>"): PlotSpec {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`invalid JSON: ${(err as Error).message}`, path);
  }
  const spec = raw as PlotSpec;
  for (const key of ["curve_path", "output_path"] as const) {
    if (typeof spec[key] !== "string" || spec[key] === "") {
      throw new SchemaError(`missing required field ${JSON.stringify(key)}`, path);
    }
  }
  if (spec.field !== undefined && spec.field !== "tau_l2" && spec.field !== "tau_w") {
    throw new SchemaError(`field must be tau_l2 or tau_w`, path);
  }
  const overlay = spec.bound_overlay ?? "none";
  if (overlay !== "none" && overlay !== "theorem1") {
    throw new SchemaError(`unknown bound_overlay ${JSON.stringify(overlay)}`, path);
  }
  if (overlay !== "none" && !spec.bound_path) {
    throw new SchemaError(`bound_overlay=${overlay} requires bound_path`, path);
  }
  if (spec.reference_curve !== undefined) {
    const rc = spec.reference_curve;
    if (typeof rc.coefficient !== "number" || typeof rc.exponent !== "number" || typeof rc.log_flag !== "boolean") {
      throw new SchemaError("reference_curve needs {coefficient, exponent, log_flag}", path);
    }
  }
  return spec;
}

export function render(spec: PlotSpec): string {
  const pts = loadCurves(spec.curve_path, spec.field);
  const ns = pts.map((p) => p.N);
  const nMin = Math.min(...ns);
  const nMax = Math.max(...ns);
  const overlays: Array<{ pts: Array<[number, number]>; style: string; label: string }> = [];

  if ((spec.bound_overlay ?? "none") === "theorem1" && spec.bound_path) {
    const bounds = loadBounds(spec.bound_path);
    overlays.push({
      pts: bounds.map((b) => [b.N, b.value] as [number, number]),
      style: 'stroke="#444" stroke-width="1.5" stroke-dasharray="8 5"',
      label: "halting-time bound",
    });
  }
  if (spec.reference_curve) {
    const rc = spec.reference_curve;
    const base = rc.log_flag ? "log(1+N)" : "N";
    overlays.push({
      pts: sampleCurve((n) => referenceValue(rc, n), nMin, nMax),
      style: 'stroke="#888" stroke-width="1.5" stroke-dasharray="2 4"',
      label: `${rc.coefficient} ${base}^${rc.exponent}${rc.offset ? ` + ${rc.offset}` : ""}`,
    });
  }
  if (spec.fit_path) {
    const fit = loadFit(spec.fit_path);
    overlays.push({
      pts: sampleCurve((n) => fitValue(fit, n), nMin, nMax),
      style: 'stroke="#c2410c" stroke-width="1.5"',
      label: `fit a N^p log N + b N^p (a=${fit.a.toPrecision(3)}, b=${fit.b.toPrecision(3)})`,
    });
  }

  const yCandidates = pts
    .map((p) => p.mean + p.stderr)
    .concat(overlays.flatMap((o) => o.pts.map(([, v]) => v).filter(Number.isFinite)));
  const yMax = Math.max(...yCandidates);
  const xPad = 0.05 * (nMax - nMin || 1);
  const fig = new Figure(
    spec.width ?? 640,
    spec.height ?? 440,
    [nMin - xPad, nMax + xPad],
    [0, 1.08 * yMax],
    spec.title ?? "",
  );
  for (const o of overlays) fig.polyline(o.pts, o.style, o.label);
  fig.errorBars(pts.map((p) => [p.N, p.mean, p.stderr] as [number, number, number]), "#1d4ed8");
  fig.points(pts.map((p) => [p.N, p.mean] as [number, number]), "#1d4ed8", `sample mean (${spec.field ?? "tau_l2"})`);
  return fig.render("N", "halting time");
}

export function renderToFile(spec: PlotSpec): void {
  writeFileSync(spec.output_path, render(spec));
}

export function renderSpecFile(specPath: string): PlotSpec {
  const spec = parseSpec(readFileSync(specPath, "utf8"), specPath);
  renderToFile(spec);
  return spec;
}
