/**
 * Minimal SVG scatter/line figure builder. No DOM, no canvas: the figure is
 * assembled as a string, which keeps rendering deterministic and dependency
 * free.
 */

export interface Margins {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export class Figure {
  private body: string[] = [];
  private legend: Array<{ label: string; style: string; kind: "line" | "dot" }> = [];
  readonly margins: Margins = { left: 64, right: 24, top: 40, bottom: 48 };

  constructor(
    readonly width: number,
    readonly height: number,
    readonly xDomain: [number, number],
    readonly yDomain: [number, number],
    readonly title: string,
  ) {}

  x(v: number): number {
    const [lo, hi] = this.xDomain;
    const span = this.width - this.margins.left - this.margins.right;
    return this.margins.left + ((v - lo) / (hi - lo)) * span;
  }

  y(v: number): number {
    const [lo, hi] = this.yDomain;
    const span = this.height - this.margins.top - this.margins.bottom;
    return this.height - this.margins.bottom - ((v - lo) / (hi - lo)) * span;
  }

  private clipped(pts: Array<[number, number]>): Array<[number, number]> {
    const [ylo, yhi] = this.yDomain;
    return pts.filter(([, v]) => Number.isFinite(v) && v >= ylo && v <= yhi);
  }

  polyline(pts: Array<[number, number]>, style: string, label?: string): void {
    const path = this.clipped(pts)
      .map(([n, v]) => `${this.x(n).toFixed(2)},${this.y(v).toFixed(2)}`)
      .join(" ");
    this.body.push(`<polyline fill="none" ${style} points="${path}"/>`);
    if (label) this.legend.push({ label, style, kind: "line" });
  }

  points(pts: Array<[number, number]>, color: string, label?: string): void {
    for (const [n, v] of this.clipped(pts)) {
      this.body.push(
        `<circle cx="${this.x(n).toFixed(2)}" cy="${this.y(v).toFixed(2)}" r="3.5" fill="${color}"/>`,
      );
    }
    if (label) this.legend.push({ label, style: `fill="${color}"`, kind: "dot" });
  }

  errorBars(pts: Array<[number, number, number]>, color: string): void {
    for (const [n, v, err] of pts) {
      if (!Number.isFinite(v) || err <= 0) continue;
      const cx = this.x(n).toFixed(2);
      const y0 = this.y(v - err).toFixed(2);
      const y1 = this.y(v + err).toFixed(2);
      this.body.push(`<line x1="${cx}" y1="${y0}" x2="${cx}" y2="${y1}" stroke="${color}" stroke-width="1.2"/>`);
      for (const yy of [y0, y1]) {
        this.body.push(
          `<line x1="${(this.x(n) - 3).toFixed(2)}" y1="${yy}" x2="${(this.x(n) + 3).toFixed(2)}" y2="${yy}" stroke="${color}" stroke-width="1.2"/>`,
        );
      }
    }
  }

  private ticks(lo: number, hi: number, count = 6): number[] {
    const rawStep = (hi - lo) / count;
    const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rawStep) ?? rawStep;
    const out: number[] = [];
    for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
      out.push(Number(v.toPrecision(12)));
    }
    return out;
  }

  render(xLabel: string, yLabel: string): string {
    const axes: string[] = [];
    const x0 = this.margins.left;
    const x1 = this.width - this.margins.right;
    const y0 = this.height - this.margins.bottom;
    const y1 = this.margins.top;
    axes.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
    axes.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
    for (const t of this.ticks(this.xDomain[0], this.xDomain[1])) {
      const px = this.x(t);
      axes.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`);
      axes.push(`<text x="${px}" y="${y0 + 18}" font-size="11" text-anchor="middle">${t}</text>`);
    }
    for (const t of this.ticks(this.yDomain[0], this.yDomain[1])) {
      const py = this.y(t);
      axes.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`);
      axes.push(`<text x="${x0 - 8}" y="${py + 4}" font-size="11" text-anchor="end">${t}</text>`);
    }
    axes.push(
      `<text x="${(x0 + x1) / 2}" y="${this.height - 10}" font-size="12" text-anchor="middle">${xLabel}</text>`,
    );
    axes.push(
      `<text x="16" y="${(y0 + y1) / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 ${(y0 + y1) / 2})">${yLabel}</text>`,
    );
    axes.push(
      `<text x="${(x0 + x1) / 2}" y="22" font-size="14" text-anchor="middle">${this.title}</text>`,
    );
    const legend: string[] = [];
    this.legend.forEach((item, i) => {
      const ly = y1 + 14 + 16 * i;
      if (item.kind === "line") {
        legend.push(`<line x1="${x0 + 10}" y1="${ly}" x2="${x0 + 34}" y2="${ly}" ${item.style}/>`);
      } else {
        legend.push(`<circle cx="${x0 + 22}" cy="${ly}" r="3.5" ${item.style}/>`);
      }
      legend.push(`<text x="${x0 + 40}" y="${ly + 4}" font-size="11">${item.label}</text>`);
    });
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      ...axes,
      ...this.body,
      ...legend,
      `</svg>`,
    ].join("\n");
  }
}
