/**
 * Single-trajectory diagnostics: imbalance, participation ratio, and the
 * generalized-variance signal from one evolve output file, stacked panels
 * on a shared time axis.
 */

import { denseColumn, readCsv, SchemaError, commentMeta } from "../csv.js";
import { FigureSpec, requireInput } from "../spec.js";
import { drawAxes, Scale, SvgCanvas } from "../svg.js";
import { dataExtent, padDomain } from "./common.js";

const PANELS: { col: string; label: string; color: string }[] = [
  { col: "i_gen", label: "imbalance", color: "#1f5fa8" },
  { col: "pr", label: "participation ratio", color: "#d1662a" },
  { col: "f_q", label: "variance signal", color: "#3d8f4e" },
];

export function renderObservables(spec: FigureSpec): string {
  const table = readCsv(requireInput(spec, "trajectory"));
  const t = denseColumn(table, "t_ns");
  const cols = PANELS.map((p) => denseColumn(table, p.col));
  const meta = commentMeta(table);

  const xLog = spec.xLog ?? false;
  const keep: number[] = [];
  t.forEach((tv, i) => {
    if (!xLog || tv > 0) keep.push(i);
  });
  if (keep.length < 2) {
    throw new SchemaError(`not enough plottable rows in ${table.path}`);
  }
  const tK = keep.map((i) => t[i]!);
  const xDomain = spec.xRange ?? padDomain(...dataExtent(tK, "t_ns"), xLog);

  const width = 640;
  const height = 640;
  const svg = new SvgCanvas(width, height);
  const panelH = 180;
  const top0 = 40;

  const bits = [
    meta.get("v_mhz") !== undefined ? `V = ${meta.get("v_mhz")} MHz` : "",
    meta.get("eps_target") !== undefined ? `eps = ${meta.get("eps_target")}` : "",
    meta.get("initial_state") !== undefined ? `state ${meta.get("initial_state")}` : "",
  ].filter((s) => s !== "");
  svg.text(width / 2, 22, spec.title ?? `trajectory (${bits.join(", ")})`,
    { anchor: "middle", size: 13 });

  PANELS.forEach((p, pi) => {
    const yVals = keep.map((i) => cols[pi]![i]!);
    const yDomain = pi === 0 && spec.yRange ? spec.yRange
      : padDomain(...dataExtent(yVals, p.col), false);
    const yTop = top0 + pi * (panelH + 16);
    const xs = new Scale(xDomain, [64, width - 24], xLog);
    const ys = new Scale(yDomain, [yTop + panelH, yTop], false);
    drawAxes(svg, xs, ys, {
      xLabel: pi === PANELS.length - 1 ? "t (ns)" : "",
      yLabel: p.label,
    });
    const pts: [number, number][] = keep.map((i, j) => [xs.map(tK[j]!), ys.map(cols[pi]![i]!)]);
    svg.path(pts, p.color, 1.4);
  });
  return svg.render();
}
