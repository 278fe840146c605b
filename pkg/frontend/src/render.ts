/** Dispatch a figure spec to its renderer and write the SVG. */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { SchemaError } from "./csv.js";
import { FigureSpec } from "./spec.js";
import { renderDos } from "./figures/dos.js";
import { renderExponents } from "./figures/exponents.js";
import { renderFiniteSize } from "./figures/finiteSize.js";
import { renderHeatmap } from "./figures/heatmap.js";
import { renderObservables } from "./figures/observables.js";
import { renderRmap } from "./figures/rmap.js";
import { renderTimeseries } from "./figures/timeseries.js";

const RENDERERS: Record<FigureSpec["kind"], (spec: FigureSpec) => string> = {
  heatmap: renderHeatmap,
  rmap: renderRmap,
  timeseries: renderTimeseries,
  exponents: renderExponents,
  observables: renderObservables,
  dos: renderDos,
  finite_size: renderFiniteSize,
};

export function renderToString(spec: FigureSpec): string {
  const fn = RENDERERS[spec.kind];
  if (fn === undefined) {
    throw new SchemaError(`no renderer for kind "${spec.kind}"`);
  }
  return fn(spec);
}

export function renderSpec(spec: FigureSpec): string {
  const svg = renderToString(spec);
  mkdirSync(dirname(spec.output), { recursive: true });
  writeFileSync(spec.output, svg, "utf8");
  return spec.output;
}
