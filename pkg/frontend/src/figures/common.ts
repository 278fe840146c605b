/** Shared plumbing for figure modules. */

import { SchemaError, Table } from "../csv.js";
import { DEFAULT_MARGIN, Scale, SvgCanvas, colormap } from "../svg.js";

export function uniqueSorted(vals: number[]): number[] {
  return [...new Set(vals)].sort((a, b) => a - b);
}

export function closeTo(a: number, b: number, tol = 1e-9): boolean {
  return Math.abs(a - b) <= tol * Math.max(1, Math.abs(a), Math.abs(b));
}

export function fmtNum(v: number): string {
  return String(parseFloat(v.toPrecision(6)));
}

export interface GridCell {
  value: number | null;
  label?: string;
}

/**
 * Categorical-axis heatmap: one rectangle per (x bin, y bin), null values
 * rendered as blank (white, light cross) so unreachable cells stay visible
 * as gaps instead of faking a color.
 */
export function drawCellGrid(
  svg: SvgCanvas,
  xBins: number[],
  yBins: number[],
  cell: (xi: number, yi: number) => number | null,
  frame: { x0: number; x1: number; y0: number; y1: number },
  vRange: [number, number],
): void {
  const { x0, x1, y0, y1 } = frame;
  const w = (x1 - x0) / xBins.length;
  const h = (y1 - y0) / yBins.length;
  for (let xi = 0; xi < xBins.length; xi++) {
    for (let yi = 0; yi < yBins.length; yi++) {
      const px = x0 + xi * w;
      // yi = 0 at the bottom of the panel
      const py = y1 - (yi + 1) * h;
      const v = cell(xi, yi);
      if (v === null) {
        svg.rect(px, py, w, h, "#ffffff", "#cccccc");
        svg.line(px + 0.2 * w, py + 0.2 * h, px + 0.8 * w, py + 0.8 * h, "#bbbbbb", 1);
        svg.line(px + 0.2 * w, py + 0.8 * h, px + 0.8 * w, py + 0.2 * h, "#bbbbbb", 1);
        continue;
      }
      const t = (v - vRange[0]) / (vRange[1] - vRange[0]);
      svg.rect(px, py, w, h, colormap(t), "#ffffff");
    }
  }
}

export function drawCategoricalAxes(
  svg: SvgCanvas,
  xBins: number[],
  yBins: number[],
  frame: { x0: number; x1: number; y0: number; y1: number },
  labels: { x: string; y: string; title?: string },
): void {
  const { x0, x1, y0, y1 } = frame;
  svg.rect(x0, y0, x1 - x0, y1 - y0, "none", "#444444");
  const w = (x1 - x0) / xBins.length;
  const h = (y1 - y0) / yBins.length;
  const xEvery = Math.max(1, Math.ceil(xBins.length / 10));
  xBins.forEach((v, i) => {
    if (i % xEvery !== 0) return;
    const px = x0 + (i + 0.5) * w;
    svg.line(px, y1, px, y1 + 4, "#444444");
    svg.text(px, y1 + 16, fmtNum(v), { anchor: "middle", size: 10 });
  });
  const yEvery = Math.max(1, Math.ceil(yBins.length / 10));
  yBins.forEach((v, i) => {
    if (i % yEvery !== 0) return;
    const py = y1 - (i + 0.5) * h;
    svg.line(x0 - 4, py, x0, py, "#444444");
    svg.text(x0 - 7, py + 3.5, fmtNum(v), { anchor: "end", size: 10 });
  });
  svg.text((x0 + x1) / 2, y1 + 34, labels.x, { anchor: "middle", size: 12 });
  svg.text(x0 - 44, (y0 + y1) / 2, labels.y, { anchor: "middle", size: 12, rotate: true });
  if (labels.title) svg.text((x0 + x1) / 2, y0 - 9, labels.title, { anchor: "middle", size: 13 });
}

export function drawColorbar(
  svg: SvgCanvas,
  frame: { x0: number; y0: number; y1: number },
  vRange: [number, number],
  label: string,
): void {
  const { x0, y0, y1 } = frame;
  const width = 14;
  const steps = 40;
  const h = (y1 - y0) / steps;
  for (let i = 0; i < steps; i++) {
    const t = (i + 0.5) / steps;
    svg.rect(x0, y1 - (i + 1) * h, width, h + 0.3, colormap(t));
  }
  svg.rect(x0, y0, width, y1 - y0, "none", "#444444");
  for (const f of [0, 0.5, 1]) {
    const v = vRange[0] + f * (vRange[1] - vRange[0]);
    const py = y1 - f * (y1 - y0);
    svg.line(x0 + width, py, x0 + width + 3, py, "#444444");
    svg.text(x0 + width + 5, py + 3.5, fmtNum(parseFloat(v.toPrecision(3))), { size: 9 });
  }
  svg.text(x0 + width / 2, y0 - 6, label, { anchor: "middle", size: 10 });
}

/** Frame plus scales for a single standard panel. */
export function panelScales(
  width: number,
  height: number,
  xDomain: [number, number],
  yDomain: [number, number],
  xLog: boolean,
  yLog: boolean,
  margin = DEFAULT_MARGIN,
): { xs: Scale; ys: Scale } {
  const xs = new Scale(xDomain, [margin.left, width - margin.right], xLog);
  const ys = new Scale(yDomain, [height - margin.bottom, margin.top], yLog);
  return { xs, ys };
}

export function padDomain(lo: number, hi: number, log: boolean): [number, number] {
  if (log) {
    if (lo <= 0) throw new SchemaError(`log axis needs positive data, min is ${lo}`);
    const f = Math.pow(hi / lo, 0.05);
    return [lo / f, hi * f];
  }
  const pad = (hi - lo) * 0.05 || Math.max(1e-12, Math.abs(hi) * 0.05, 0.05);
  return [lo - pad, hi + pad];
}

export function dataExtent(vals: (number | null)[], what: string): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of vals) {
    if (v === null) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo <= hi)) throw new SchemaError(`no numeric data for ${what}`);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

export function metaNumber(table: Table, key: string): number | null {
  for (const c of table.comments) {
    const idx = c.indexOf(": ");
    if (idx > 0 && c.slice(0, idx) === key) {
      const v = Number(c.slice(idx + 2));
      return Number.isNaN(v) ? null : v;
    }
  }
  return null;
}
