import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { fitValue, referenceValue } from "../src/curves.js";
import { parseSpec, render, renderSpecFile } from "../src/plot.js";

function workdir(): string {
  return mkdtempSync(join(tmpdir(), "cglab-plots-"));
}

const CURVES = `N,field,mean,stderr,count
100,tau_l2,62.77,0.55,100
200,tau_l2,99.8,0.95,100
300,tau_l2,131.88,1.06,100
400,tau_l2,153.47,1.41,100
500,tau_l2,176.85,1.14,100
`;

describe("reference curves", () => {
  it("evaluates power curves (7.5 sqrt(N))", () => {
    expect(referenceValue({ coefficient: 7.5, exponent: 0.5, log_flag: false }, 100)).toBeCloseTo(75, 12);
  });

  it("evaluates log curves with offset (6 log^(1/2)(1+N) + 28.5)", () => {
    const v = referenceValue({ coefficient: 6, exponent: 0.5, log_flag: true, offset: 28.5 }, 100);
    expect(v).toBeCloseTo(6 * Math.sqrt(Math.log(101)) + 28.5, 12);
  });

  it("evaluates the fitted growth model", () => {
    const fit = { p: 0.5, a: 0.67, b: 3.51, residual_norm: 0, plan_digest: "" };
    expect(fitValue(fit, 100)).toBeCloseTo(0.67 * 10 * Math.log(100) + 35.1, 10);
  });
});

describe("spec validation", () => {
  it("requires curve_path and output_path", () => {
    expect(() => parseSpec('{"output_path": "x.svg"}')).toThrow(/curve_path/);
  });

  it("requires bound_path when the bound overlay is on", () => {
    expect(() =>
      parseSpec('{"curve_path": "c.csv", "output_path": "x.svg", "bound_overlay": "theorem1"}'),
    ).toThrow(/bound_path/);
  });

  it("rejects unknown overlays and fields", () => {
    expect(() =>
      parseSpec('{"curve_path": "c", "output_path": "o", "bound_overlay": "magic"}'),
    ).toThrow(/bound_overlay/);
    expect(() =>
      parseSpec('{"curve_path": "c", "output_path": "o", "field": "tau_q"}'),
    ).toThrow(/field/);
  });
});

describe("rendering", () => {
  it("renders a curve with reference overlay to SVG (smoke)", () => {
    const dir = workdir();
    const curvePath = join(dir, "curves.csv");
    writeFileSync(curvePath, CURVES);
    const svg = render({
      curve_path: curvePath,
      output_path: join(dir, "fig.svg"),
      reference_curve: { coefficient: 7.5, exponent: 0.5, log_flag: false },
      title: "sample mean",
    });
    expect(svg).toContain("<svg");
    expect(svg).toContain("polyline");
    expect(svg).toContain("circle");
    expect(svg).toContain("sample mean");
  });

  it("renders bound and fit overlays from files", () => {
    const dir = workdir();
    const curvePath = join(dir, "curves.csv");
    const boundPath = join(dir, "bounds.csv");
    const fitPath = join(dir, "fits.json");
    writeFileSync(curvePath, CURVES);
    writeFileSync(boundPath, "N,value\n100,128.99\n300,232.94\n500,306.43\n");
    writeFileSync(fitPath, '{"p": 0.5, "a": 0.67, "b": 3.51, "residual_norm": 0.1, "plan_digest": "d"}');
    const svg = render({
      curve_path: curvePath,
      output_path: join(dir, "fig.svg"),
      bound_overlay: "theorem1",
      bound_path: boundPath,
      fit_path: fitPath,
    });
    expect(svg).toContain("halting-time bound");
    expect(svg).toContain("fit a N^p log N + b N^p");
  });

  it("is deterministic and writes the output file", () => {
    const dir = workdir();
    const curvePath = join(dir, "curves.csv");
    writeFileSync(curvePath, CURVES);
    const specPath = join(dir, "spec.json");
    const outPath = join(dir, "out.svg");
    writeFileSync(
      specPath,
      JSON.stringify({
        curve_path: curvePath,
        output_path: outPath,
        reference_curve: { coefficient: 6, exponent: 0.5, log_flag: true, offset: 28.5 },
        title: "fig5-style",
      }),
    );
    renderSpecFile(specPath);
    const first = readFileSync(outPath, "utf8");
    renderSpecFile(specPath);
    expect(readFileSync(outPath, "utf8")).toBe(first);
    expect(first.startsWith("<svg")).toBe(true);
  });

  it("selects the tau_w rows when asked", () => {
    const dir = workdir();
    const curvePath = join(dir, "curves.csv");
    writeFileSync(curvePath, CURVES + "100,tau_w,60.0,0.5,100\n200,tau_w,95.0,0.9,100\n");
    const svg = render({ curve_path: curvePath, output_path: join(dir, "f.svg"), field: "tau_w" });
    expect(svg).toContain("tau_w");
  });
});
