/**
 * Energy-resolved mean gap-ratio map. The aggregated grid only carries
 * (bin, amplitude) pairs that had enough in-window levels, so the full
 * bin lattice is rebuilt here and absent pairs render blank.
 */

import { denseColumn, readCsv } from "../csv.js";
import { FigureSpec, optNumber, requireInput } from "../spec.js";
import { SvgCanvas } from "../svg.js";
import {
  drawCategoricalAxes,
  drawCellGrid,
  drawColorbar,
  metaNumber,
  uniqueSorted,
} from "./common.js";

// limiting statistics for the two phases; used as the fixed color range
const POISSON_R = 0.3863;
const GOE_R = 0.5307;

export function renderRmap(spec: FigureSpec): string {
  const table = readCsv(requireInput(spec, "rmap"));
  const centers = denseColumn(table, "eps_bin_center");
  const v = denseColumn(table, "v_mhz");
  const meanR = denseColumn(table, "mean_r");

  const lo = optNumber(spec, "v_min") ?? metaNumber(table, "poisson-mean-r") ?? POISSON_R;
  const hi = optNumber(spec, "v_max") ?? metaNumber(table, "goe-mean-r") ?? GOE_R;

  const xBins = uniqueSorted(centers);
  const yBins = uniqueSorted(v);
  const grid = new Map<string, number>();
  for (let i = 0; i < table.nRows; i++) {
    grid.set(`${centers[i]},${v[i]}`, meanR[i]!);
  }

  const width = 640;
  const height = 460;
  const frame = { x0: 70, x1: width - 90, y0: 40, y1: height - 56 };
  const svg = new SvgCanvas(width, height);
  drawCellGrid(svg, xBins, yBins,
    (xi, yi) => grid.get(`${xBins[xi]},${yBins[yi]}`) ?? null,
    frame, [lo, hi]);
  drawCategoricalAxes(svg, xBins, yBins, frame, {
    x: "energy density bin center",
    y: "disorder amplitude (MHz)",
    title: spec.title ?? "mean adjacent-gap ratio",
  });
  drawColorbar(svg, { x0: frame.x1 + 18, y0: frame.y0, y1: frame.y1 }, [lo, hi], "r");
  return svg.render();
}
