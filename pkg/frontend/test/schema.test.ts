import { describe, expect, it } from "vitest";

import { parseBoundsCsv, parseCurvesCsv, parseFitJson, SchemaError } from "../src/schema.js";

const CURVES = `N,field,mean,stderr,count
100,tau_l2,62.770000000000003,0.55000000000000004,100
200,tau_l2,99.799999999999997,0.94999999999999996,100
100,tau_w,62.5,0.5,100
`;

describe("curves.csv", () => {
  it("parses rows and preserves 17-digit floats", () => {
    const rows = parseCurvesCsv(CURVES);
    expect(rows).toHaveLength(3);
    expect(rows[0].mean).toBe(62.770000000000003);
    expect(rows[2].field).toBe("tau_w");
  });

  it("rejects a wrong header with line 1", () => {
    try {
      parseCurvesCsv("N,mean\n1,2\n", "x.csv");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect((err as SchemaError).line).toBe(1);
    }
  });

  it("rejects a short row with its line number", () => {
    try {
      parseCurvesCsv("N,field,mean,stderr,count\n100,tau_l2,1.0\n", "x.csv");
      expect.unreachable();
    } catch (err) {
      expect((err as SchemaError).line).toBe(2);
    }
  });

  it("rejects non-numeric cells", () => {
    expect(() =>
      parseCurvesCsv("N,field,mean,stderr,count\n100,tau_l2,oops,0,1\n"),
    ).toThrow(/bad mean/);
  });

  it("rejects empty files", () => {
    expect(() => parseCurvesCsv("N,field,mean,stderr,count\n")).toThrow(/no data rows/);
  });
});

describe("bounds.csv", () => {
  it("parses the two-column dump", () => {
    const rows = parseBoundsCsv("N,value\n100,128.99219826090119\n200,187.3\n");
    expect(rows[0].value).toBeCloseTo(128.99219826090119, 12);
  });

  it("validates the header", () => {
    expect(() => parseBoundsCsv("N,bound\n1,2\n")).toThrow(SchemaError);
  });
});

describe("fits.json", () => {
  it("parses a fit", () => {
    const fit = parseFitJson('{"p": 0.5, "a": 0.67, "b": 3.51, "residual_norm": 0.001, "plan_digest": "ab"}');
    expect(fit.a).toBe(0.67);
    expect(fit.plan_digest).toBe("ab");
  });

  it("rejects missing fields", () => {
    expect(() => parseFitJson('{"p": 0.5}')).toThrow(/missing numeric field/);
  });

  it("rejects broken JSON", () => {
    expect(() => parseFitJson("{")).toThrow(/invalid JSON/);
  });
});
