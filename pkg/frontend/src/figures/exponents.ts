/**
 * Decay exponent versus disorder amplitude, one series per energy-density
 * target, with the saturation baseline band and the estimated crossing
 * amplitude from the crossing summary when provided.
 */

import { denseColumn, numColumn, readCsv, SchemaError } from "../csv.js";
import { FigureSpec, requireInput } from "../spec.js";
import { drawAxes, SERIES_COLORS, SvgCanvas } from "../svg.js";
import { closeTo, dataExtent, fmtNum, padDomain, panelScales, uniqueSorted } from "./common.js";

interface VcRow {
  eps: number;
  vc: number | null;
  vcErr: number | null;
  baseline: number | null;
  baselineErr: number | null;
}

export function renderExponents(spec: FigureSpec): string {
  const table = readCsv(requireInput(spec, "fits"));
  const eps = denseColumn(table, "eps");
  const v = denseColumn(table, "v_mhz");
  const xi = numColumn(table, "xi");
  const xiErr = numColumn(table, "xi_err");

  const vcRows: VcRow[] = [];
  const vcPath = spec.inputs["vc"];
  if (vcPath !== undefined) {
    const vt = readCsv(vcPath);
    const ve = denseColumn(vt, "eps");
    const vvc = numColumn(vt, "vc_mhz");
    const vve = numColumn(vt, "vc_err");
    const vb = numColumn(vt, "baseline");
    const vbe = numColumn(vt, "baseline_err");
    for (let i = 0; i < vt.nRows; i++) {
      vcRows.push({
        eps: ve[i]!, vc: vvc[i] ?? null, vcErr: vve[i] ?? null,
        baseline: vb[i] ?? null, baselineErr: vbe[i] ?? null,
      });
    }
  }

  const epsVals = uniqueSorted(eps);
  const series = epsVals.map((e) => {
    const pts: { v: number; xi: number; err: number }[] = [];
    for (let i = 0; i < table.nRows; i++) {
      if (!closeTo(eps[i]!, e) || xi[i] === null) continue;
      pts.push({ v: v[i]!, xi: xi[i]!, err: xiErr[i] ?? 0 });
    }
    pts.sort((a, b) => a.v - b.v);
    return { eps: e, pts };
  }).filter((s) => s.pts.length > 0);
  if (series.length === 0) {
    throw new SchemaError(`no usable exponent rows in ${table.path}`);
  }

  const xLog = spec.xLog ?? true;
  const yLog = spec.yLog ?? false;
  const allV = series.flatMap((s) => s.pts.map((p) => p.v));
  const allXi = series.flatMap((s) => s.pts.map((p) => p.xi));
  const xDomain = spec.xRange ?? padDomain(...dataExtent(allV, "v_mhz"), xLog);
  const yDomain = spec.yRange ?? padDomain(
    Math.min(0, dataExtent(allXi, "xi")[0]), dataExtent(allXi, "xi")[1], yLog);

  const width = 640;
  const height = 460;
  const svg = new SvgCanvas(width, height);
  const { xs, ys } = panelScales(width, height, xDomain, yDomain, xLog, yLog);

  // baseline band behind everything, from the first row with a baseline
  const bandRow = vcRows.find((r) => r.baseline !== null);
  if (bandRow && bandRow.baseline !== null) {
    const be = bandRow.baselineErr ?? 0;
    const yTop = ys.map(Math.min(bandRow.baseline + be, yDomain[1]));
    const yBot = ys.map(Math.max(bandRow.baseline - be, yDomain[0]));
    svg.rect(xs.range[0], yTop, xs.range[1] - xs.range[0], Math.max(yBot - yTop, 1), "#e8e8e8");
    const yMid = ys.map(bandRow.baseline);
    svg.line(xs.range[0], yMid, xs.range[1], yMid, "#999999", 1, "2,3");
  }

  drawAxes(svg, xs, ys, {
    xLabel: "disorder amplitude (MHz)",
    yLabel: "decay exponent",
    title: spec.title ?? "subdiffusive exponent ladder",
  });

  series.forEach((s, si) => {
    const color = SERIES_COLORS[si % SERIES_COLORS.length]!;
    const pts: [number, number][] = s.pts.map((p) => [xs.map(p.v), ys.map(p.xi)]);
    s.pts.forEach((p) => {
      const px = xs.map(p.v);
      svg.line(px, ys.map(clamp(p.xi - p.err, yDomain)),
               px, ys.map(clamp(p.xi + p.err, yDomain)), color, 0.9);
    });
    svg.path(pts, color, 1.5);
    pts.forEach(([px, py]) => svg.circle(px, py, 2.6, color));
    // crossing estimate for this series
    const vr = vcRows.find((r) => closeTo(r.eps, s.eps));
    if (vr && vr.vc !== null && vr.vc >= xDomain[0] && vr.vc <= xDomain[1]) {
      const px = xs.map(vr.vc);
      svg.line(px, ys.range[1], px, ys.range[0], color, 1, "4,3");
    }
  });

  const lx = xs.range[1] - 150;
  let ly = ys.range[1] + 14;
  series.forEach((s, si) => {
    const color = SERIES_COLORS[si % SERIES_COLORS.length]!;
    svg.line(lx, ly - 4, lx + 22, ly - 4, color, 2);
    const vr = vcRows.find((r) => closeTo(r.eps, s.eps));
    const tag = vr && vr.vc !== null
      ? `eps = ${fmtNum(s.eps)}  (Vc = ${fmtNum(parseFloat(vr.vc.toFixed(1)))})`
      : `eps = ${fmtNum(s.eps)}`;
    svg.text(lx + 28, ly, tag, { size: 10 });
    ly += 14;
  });
  return svg.render();
}

function clamp(v: number, dom: [number, number]): number {
  return Math.min(dom[1], Math.max(dom[0], v));
}
