/**
 * Disorder-averaged imbalance decay curves on log-log axes, one curve per
 * disorder amplitude at a fixed energy-density target (or the transpose),
 * with optional power-law fit overlays from the fit summary.
 */

import { denseColumn, numColumn, readCsv, SchemaError, Table } from "../csv.js";
import { FigureSpec, optNumber, requireInput } from "../spec.js";
import { drawAxes, SERIES_COLORS, SvgCanvas } from "../svg.js";
import { closeTo, dataExtent, fmtNum, padDomain, panelScales, uniqueSorted } from "./common.js";

interface Curve {
  label: string;
  t: number[];
  y: number[];
  sem: number[];
  fit?: { xi: number; lo: number; hi: number };
}

interface FitRow {
  eps: number;
  v: number;
  xi: number;
  lo: number;
  hi: number;
}

function readFits(table: Table): FitRow[] {
  const eps = denseColumn(table, "eps");
  const v = denseColumn(table, "v_mhz");
  const xi = numColumn(table, "xi");
  const lo = denseColumn(table, "window_lo");
  const hi = denseColumn(table, "window_hi");
  const out: FitRow[] = [];
  for (let i = 0; i < table.nRows; i++) {
    if (xi[i] === null) continue;
    out.push({ eps: eps[i]!, v: v[i]!, xi: xi[i]!, lo: lo[i]!, hi: hi[i]! });
  }
  return out;
}

const OBSERVABLES: Record<string, string> = {
  i_gen: "imbalance",
  pr: "participation ratio",
  f_q: "variance signal",
};

export function renderTimeseries(spec: FigureSpec): string {
  const rawObs = spec.options["observable"];
  if (rawObs !== undefined && typeof rawObs !== "string") {
    throw new SchemaError('option "observable" must be a string');
  }
  const obs = rawObs ?? "i_gen";
  const yName = OBSERVABLES[obs];
  if (yName === undefined) {
    throw new SchemaError(
      `option "observable" must be one of ${Object.keys(OBSERVABLES).join(", ")}`);
  }
  const table = readCsv(requireInput(spec, "average"));
  const eps = denseColumn(table, "eps");
  const v = denseColumn(table, "v_mhz");
  const t = denseColumn(table, "t_ns");
  const mean = numColumn(table, `${obs}_mean`);
  const sem = numColumn(table, `${obs}_sem`);

  // fit overlays describe the imbalance decay only
  const fitsPath = obs === "i_gen" ? spec.inputs["fits"] : undefined;
  const fits = fitsPath === undefined ? [] : readFits(readCsv(fitsPath));

  const epsFix = optNumber(spec, "eps");
  const vFix = optNumber(spec, "v");
  if (epsFix !== undefined && vFix !== undefined) {
    throw new SchemaError('timeseries takes option "eps" or "v", not both');
  }
  // default: fix the first energy density, sweep amplitude
  const fixEps = vFix === undefined;
  const fixed: number = fixEps ? (epsFix ?? uniqueSorted(eps)[0]!) : vFix!;
  const sweepVals = uniqueSorted(fixEps ? v : eps).filter((sv) =>
    someRow(table.nRows, (i) =>
      closeTo(fixEps ? eps[i]! : v[i]!, fixed) && closeTo(fixEps ? v[i]! : eps[i]!, sv)));
  if (sweepVals.length === 0) {
    throw new SchemaError(
      `no rows with ${fixEps ? "eps" : "v_mhz"} = ${fixed} in ${table.path}`);
  }

  const xLog = spec.xLog ?? true;
  const yLog = spec.yLog ?? true;
  const curves: Curve[] = sweepVals.map((sv) => {
    const ct: number[] = [];
    const cy: number[] = [];
    const cs: number[] = [];
    for (let i = 0; i < table.nRows; i++) {
      const fi = fixEps ? eps[i]! : v[i]!;
      const si = fixEps ? v[i]! : eps[i]!;
      if (!closeTo(fi, fixed) || !closeTo(si, sv)) continue;
      if (mean[i] === null) continue;
      if (xLog && t[i]! <= 0) continue;
      if (yLog && mean[i]! <= 0) continue;
      ct.push(t[i]!);
      cy.push(mean[i]!);
      cs.push(sem[i] ?? 0);
    }
    const curve: Curve = {
      label: fixEps ? `V = ${fmtNum(sv)} MHz` : `eps = ${fmtNum(sv)}`,
      t: ct, y: cy, sem: cs,
    };
    const fr = fits.find((f) =>
      closeTo(fixEps ? f.eps : f.v, fixed) && closeTo(fixEps ? f.v : f.eps, sv));
    if (fr) curve.fit = { xi: fr.xi, lo: fr.lo, hi: fr.hi };
    return curve;
  }).filter((c) => c.t.length > 0);
  if (curves.length === 0) {
    throw new SchemaError(`no plottable points in ${table.path} for the requested slice`);
  }

  const allT = curves.flatMap((c) => c.t);
  const allY = curves.flatMap((c) => c.y);
  const xDomain = spec.xRange ?? padDomain(...dataExtent(allT, "t_ns"), xLog);
  const yDomain = spec.yRange ?? padDomain(...dataExtent(allY, "i_gen_mean"), yLog);

  const width = 640;
  const height = 460;
  const svg = new SvgCanvas(width, height);
  const { xs, ys } = panelScales(width, height, xDomain, yDomain, xLog, yLog);
  drawAxes(svg, xs, ys, {
    xLabel: "t (ns)",
    yLabel: yName,
    title: spec.title ??
      (fixEps ? `${yName} at energy density ${fmtNum(fixed)}` : `${yName} at V = ${fmtNum(fixed)} MHz`),
  });

  curves.forEach((c, ci) => {
    const color = SERIES_COLORS[ci % SERIES_COLORS.length]!;
    const pts: [number, number][] = c.t.map((tv, i) => [xs.map(tv), ys.map(c.y[i]!)]);
    for (let i = 0; i < c.t.length; i++) {
      const yloV = c.y[i]! - c.sem[i]!;
      const yhiV = c.y[i]! + c.sem[i]!;
      if (yLog && yloV <= 0) continue;
      svg.line(xs.map(c.t[i]!), ys.map(Math.max(yloV, yDomain[0])),
               xs.map(c.t[i]!), ys.map(Math.min(yhiV, yDomain[1])), color, 0.8);
    }
    svg.path(pts, color, 1.6);
    if (c.fit) {
      const anchorIdx = nearestIdx(c.t, c.fit.lo);
      if (anchorIdx >= 0) {
        const t0 = c.t[anchorIdx]!;
        const y0 = c.y[anchorIdx]!;
        const seg: [number, number][] = [];
        for (let s = 0; s <= 24; s++) {
          const tv = c.fit.lo * Math.pow(c.fit.hi / c.fit.lo, s / 24);
          const yv = y0 * Math.pow(tv / t0, -c.fit.xi);
          if (tv < xDomain[0] || tv > xDomain[1]) continue;
          if (yv < yDomain[0] || yv > yDomain[1]) continue;
          seg.push([xs.map(tv), ys.map(yv)]);
        }
        svg.path(seg, "#222222", 1.0, "5,3");
      }
    }
  });

  // legend, top-right inside the frame
  const lx = xs.range[1] - 150;
  let ly = ys.range[1] + 14;
  curves.forEach((c, ci) => {
    const color = SERIES_COLORS[ci % SERIES_COLORS.length]!;
    svg.line(lx, ly - 4, lx + 22, ly - 4, color, 2);
    const tag = c.fit ? `${c.label}  (xi = ${fmtNum(parseFloat(c.fit.xi.toFixed(3)))})` : c.label;
    svg.text(lx + 28, ly, tag, { size: 10 });
    ly += 14;
  });
  return svg.render();
}

function nearestIdx(arr: number[], target: number): number {
  let best = -1;
  let bd = Infinity;
  arr.forEach((v, i) => {
    const d = Math.abs(v - target);
    if (d < bd) {
      bd = d;
      best = i;
    }
  });
  return best;
}

function someRow(n: number, pred: (i: number) => boolean): boolean {
  for (let i = 0; i < n; i++) if (pred(i)) return true;
  return false;
}
