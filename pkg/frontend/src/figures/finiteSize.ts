/**
 * Finite-size scan: late-time imbalance versus chain length, one series per
 * (energy density, amplitude) pair, with the diagonal-ensemble prediction
 * as open markers where the scan produced it.
 */

import { denseColumn, numColumn, readCsv, SchemaError } from "../csv.js";
import { FigureSpec, requireInput } from "../spec.js";
import { drawAxes, SERIES_COLORS, SvgCanvas } from "../svg.js";
import { closeTo, dataExtent, fmtNum, padDomain, panelScales, uniqueSorted } from "./common.js";

export function renderFiniteSize(spec: FigureSpec): string {
  const table = readCsv(requireInput(spec, "finite_size"));
  const n = denseColumn(table, "n_sites");
  const eps = denseColumn(table, "eps");
  const v = denseColumn(table, "v_mhz");
  const fin = numColumn(table, "i_gen_final");
  const finSem = numColumn(table, "i_gen_final_sem");
  const de = numColumn(table, "i_gen_de");

  interface Pt { n: number; y: number; sem: number; de: number | null }
  const combos: { eps: number; v: number; pts: Pt[] }[] = [];
  for (const e of uniqueSorted(eps)) {
    for (const vv of uniqueSorted(v)) {
      const pts: Pt[] = [];
      for (let i = 0; i < table.nRows; i++) {
        if (!closeTo(eps[i]!, e) || !closeTo(v[i]!, vv)) continue;
        if (fin[i] === null) continue;
        pts.push({ n: n[i]!, y: fin[i]!, sem: finSem[i] ?? 0, de: de[i] ?? null });
      }
      pts.sort((a, b) => a.n - b.n);
      if (pts.length > 0) combos.push({ eps: e, v: vv, pts });
    }
  }
  if (combos.length === 0) {
    throw new SchemaError(`no usable rows in ${table.path}`);
  }

  const xLog = spec.xLog ?? false;
  const yLog = spec.yLog ?? false;
  const allN = combos.flatMap((c) => c.pts.map((p) => p.n));
  const allY = combos.flatMap((c) => c.pts.flatMap((p) => p.de === null ? [p.y] : [p.y, p.de]));
  const xe = dataExtent(allN, "n_sites");
  const xDomain = spec.xRange ?? [xe[0] - 0.5, xe[1] + 0.5];
  const yDomain = spec.yRange ?? padDomain(
    yLog ? dataExtent(allY, "imbalance")[0] : Math.min(0, dataExtent(allY, "imbalance")[0]),
    dataExtent(allY, "imbalance")[1], yLog);

  const width = 640;
  const height = 460;
  const svg = new SvgCanvas(width, height);
  const { xs, ys } = panelScales(width, height, xDomain, yDomain, xLog, yLog);
  drawAxes(svg, xs, ys, {
    xLabel: "chain length (sites)",
    yLabel: "late-time imbalance",
    title: spec.title ?? "finite-size scan",
  });

  combos.forEach((c, ci) => {
    const color = SERIES_COLORS[ci % SERIES_COLORS.length]!;
    const pts: [number, number][] = c.pts.map((p) => [xs.map(p.n), ys.map(p.y)]);
    c.pts.forEach((p) => {
      const px = xs.map(p.n);
      const lo = Math.max(p.y - p.sem, yDomain[0]);
      const hi = Math.min(p.y + p.sem, yDomain[1]);
      if (yLog && p.y - p.sem <= 0) return;
      svg.line(px, ys.map(lo), px, ys.map(hi), color, 0.9);
    });
    svg.path(pts, color, 1.5);
    pts.forEach(([px, py]) => svg.circle(px, py, 2.8, color));
    // diagonal-ensemble prediction: open markers joined by a dashed line
    const dePts: [number, number][] = c.pts
      .filter((p) => p.de !== null && (!yLog || p.de > 0))
      .map((p) => [xs.map(p.n), ys.map(p.de!)]);
    if (dePts.length > 0) {
      svg.path(dePts, color, 1.0, "3,3");
      dePts.forEach(([px, py]) => {
        svg.circle(px, py, 3.2, "#ffffff");
        svg.raw(`<circle cx="${px.toFixed(2)}" cy="${py.toFixed(2)}" r="3.2" ` +
                `fill="none" stroke="${color}" stroke-width="1.2"/>`);
      });
    }
  });

  const lx = xs.range[0] + 12;
  let ly = ys.range[1] + 14;
  combos.forEach((c, ci) => {
    const color = SERIES_COLORS[ci % SERIES_COLORS.length]!;
    svg.line(lx, ly - 4, lx + 22, ly - 4, color, 2);
    svg.text(lx + 28, ly, `eps = ${fmtNum(c.eps)}, V = ${fmtNum(c.v)} MHz`, { size: 10 });
    ly += 14;
  });
  svg.text(lx, ly + 2, "open markers: diagonal-ensemble prediction", { size: 9 });
  return svg.render();
}
