/**
 * Snapshot imbalance heatmap over (energy-density target, disorder amplitude).
 * Cells with no completed realization arrive as blank fields and render as
 * crossed-out blanks, never as an interpolated color.
 */

import { numColumn, denseColumn, readCsv, SchemaError } from "../csv.js";
import { FigureSpec, optNumber, requireInput } from "../spec.js";
import { SvgCanvas } from "../svg.js";
import {
  closeTo,
  dataExtent,
  drawCategoricalAxes,
  drawCellGrid,
  drawColorbar,
  fmtNum,
  uniqueSorted,
} from "./common.js";

export function renderHeatmap(spec: FigureSpec): string {
  const table = readCsv(requireInput(spec, "heatmap"));
  const eps = denseColumn(table, "eps");
  const v = denseColumn(table, "v_mhz");
  const t = denseColumn(table, "t_ns");
  const mean = numColumn(table, "i_gen_mean");

  const times = uniqueSorted(t);
  const tWant = optNumber(spec, "t_ns") ?? times[0]!;
  if (!times.some((x) => closeTo(x, tWant))) {
    throw new SchemaError(
      `snapshot t_ns=${tWant} not in ${table.path} (have ${times.map(fmtNum).join(", ")})`);
  }

  const xBins = uniqueSorted(eps);
  const yBins = uniqueSorted(v);
  const grid = new Map<string, number | null>();
  for (let i = 0; i < table.nRows; i++) {
    if (!closeTo(t[i]!, tWant)) continue;
    grid.set(`${eps[i]},${v[i]}`, mean[i]!);
  }

  const present = [...grid.values()];
  const vLo = optNumber(spec, "v_min");
  const vHi = optNumber(spec, "v_max");
  const vRange: [number, number] =
    vLo !== undefined && vHi !== undefined ? [vLo, vHi] : robustRange(present);

  const width = 640;
  const height = 460;
  const frame = { x0: 70, x1: width - 90, y0: 40, y1: height - 56 };
  const svg = new SvgCanvas(width, height);
  drawCellGrid(svg, xBins, yBins,
    (xi, yi) => grid.get(`${xBins[xi]},${yBins[yi]}`) ?? null,
    frame, vRange);
  drawCategoricalAxes(svg, xBins, yBins, frame, {
    x: "energy density target",
    y: "disorder amplitude (MHz)",
    title: spec.title ?? `imbalance at t = ${fmtNum(tWant)} ns`,
  });
  drawColorbar(svg, { x0: frame.x1 + 18, y0: frame.y0, y1: frame.y1 }, vRange, "I");
  return svg.render();
}

function robustRange(vals: (number | null)[]): [number, number] {
  const [lo, hi] = dataExtent(vals, "heatmap cells");
  // imbalance lives in [0, 1]; clamp the color range into it when data does
  return [Math.max(0, Math.min(lo, 0)), Math.min(1, Math.max(hi, 0.5))];
}
