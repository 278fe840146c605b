/**
 * Minimal deterministic SVG emitter: fixed-precision coordinates, no
 * timestamps, no randomness, so the same inputs always produce the same
 * bytes. Only the handful of primitives the figure kinds need.
 */

export interface Margin {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_MARGIN: Margin = { left: 64, right: 20, top: 28, bottom: 48 };

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function fmt(v: number): string {
  // fixed precision keeps output byte-stable across platforms
  return v.toFixed(2).replace(/^-0\.00$/, "0.00");
}

export class Scale {
  constructor(
    readonly domain: [number, number],
    readonly range: [number, number],
    readonly log: boolean,
  ) {
    if (log && (domain[0] <= 0 || domain[1] <= 0)) {
      throw new Error(`log scale needs a positive domain, got [${domain[0]}, ${domain[1]}]`);
    }
  }

  map(v: number): number {
    const [d0, d1] = this.domain;
    const [r0, r1] = this.range;
    let t: number;
    if (this.log) {
      t = (Math.log(v) - Math.log(d0)) / (Math.log(d1) - Math.log(d0));
    } else {
      t = (v - d0) / (d1 - d0);
    }
    return r0 + t * (r1 - r0);
  }

  ticks(): number[] {
    const [d0, d1] = this.domain;
    if (this.log) {
      const out: number[] = [];
      const e0 = Math.ceil(Math.log10(d0) - 1e-9);
      const e1 = Math.floor(Math.log10(d1) + 1e-9);
      for (let e = e0; e <= e1; e++) out.push(Math.pow(10, e));
      if (out.length >= 2) return out;
      return [d0, d1];
    }
    const span = d1 - d0;
    const step = niceStep(span / 5);
    const out: number[] = [];
    for (let v = Math.ceil(d0 / step) * step; v <= d1 + 1e-9 * span; v += step) {
      out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
    }
    return out;
  }
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const r = raw / mag;
  if (r <= 1) return mag;
  if (r <= 2) return 2 * mag;
  if (r <= 5) return 5 * mag;
  return 10 * mag;
}

export function tickLabel(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    if (Math.abs(v - Math.pow(10, e)) < 1e-9 * v) {
      return e >= -2 && e <= 3 ? String(Math.pow(10, e)) : `1e${e}`;
    }
  }
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    // trim trailing zeros without exponent form
    return String(parseFloat(v.toPrecision(6)));
  }
  return v.toExponential(1);
}

/** Two-segment colormap (cold blue -> warm orange) with fixed stops. */
export function colormap(t: number): string {
  const x = Math.min(1, Math.max(0, t));
  const stops: [number, [number, number, number]][] = [
    [0.0, [18, 38, 92]],
    [0.35, [46, 110, 168]],
    [0.6, [240, 236, 160]],
    [0.8, [228, 130, 44]],
    [1.0, [158, 28, 28]],
  ];
  for (let i = 1; i < stops.length; i++) {
    const [t1, c1] = stops[i]!;
    const [t0, c0] = stops[i - 1]!;
    if (x <= t1) {
      const u = (x - t0) / (t1 - t0);
      const mix = c0.map((a, j) => Math.round(a + u * (c1[j]! - a)));
      return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
    }
  }
  return "rgb(158,28,28)";
}

export const SERIES_COLORS = [
  "#1f5fa8", "#d1662a", "#3d8f4e", "#9d3fa8", "#b3332e", "#6b6b6b",
  "#2aa198", "#8a6d1a",
];

export class SvgCanvas {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}">`);
    this.parts.push(`<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`);
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, w = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
      `stroke="${stroke}" stroke-width="${w}"${d}/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, stroke = ""): void {
    const s = stroke ? ` stroke="${stroke}" stroke-width="0.5"` : "";
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"${s}/>`);
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${r}" fill="${fill}"/>`);
  }

  path(points: [number, number][], stroke: string, w = 1.5, dash = ""): void {
    if (points.length === 0) return;
    const d = points
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`)
      .join(" ");
    const da = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(`<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${w}"${da}/>`);
  }

  text(x: number, y: number, s: string, opts: { size?: number; anchor?: string; rotate?: boolean } = {}): void {
    const size = opts.size ?? 12;
    const anchor = opts.anchor ?? "start";
    const tr = opts.rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}" ` +
      `${FONT} fill="#222222"${tr}>${escapeXml(s)}</text>`);
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export interface AxesOpts {
  xLabel: string;
  yLabel: string;
  title?: string;
}

/** Draw frame, ticks, labels for one plot panel; returns nothing, mutates canvas. */
export function drawAxes(
  svg: SvgCanvas,
  xs: Scale,
  ys: Scale,
  opts: AxesOpts,
): void {
  const [x0, x1] = xs.range;
  const [yTop, yBot] = [Math.min(...ys.range), Math.max(...ys.range)];
  svg.rect(x0, yTop, x1 - x0, yBot - yTop, "none", "#444444");
  for (const t of xs.ticks()) {
    const px = xs.map(t);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    svg.line(px, yBot, px, yBot + 4, "#444444");
    svg.text(px, yBot + 16, tickLabel(t, xs.log), { anchor: "middle", size: 10 });
  }
  for (const t of ys.ticks()) {
    const py = ys.map(t);
    if (py < yTop - 0.5 || py > yBot + 0.5) continue;
    svg.line(x0 - 4, py, x0, py, "#444444");
    svg.text(x0 - 7, py + 3.5, tickLabel(t, ys.log), { anchor: "end", size: 10 });
  }
  const cx = (x0 + x1) / 2;
  svg.text(cx, yBot + 34, opts.xLabel, { anchor: "middle", size: 12 });
  svg.text(x0 - 44, (yTop + yBot) / 2, opts.yLabel, { anchor: "middle", size: 12, rotate: true });
  if (opts.title) svg.text(cx, yTop - 9, opts.title, { anchor: "middle", size: 13 });
}
