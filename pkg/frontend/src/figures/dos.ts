/**
 * Paired density-of-states panels: diagonal (Fock) energy histogram as bars
 * against the eigenvalue histogram as a step line, one panel per input
 * file, inputs ordered by role name for stable output.
 */

import { denseColumn, readCsv, SchemaError } from "../csv.js";
import { FigureSpec } from "../spec.js";
import { drawAxes, Scale, SvgCanvas } from "../svg.js";
import { dataExtent, metaNumber, padDomain } from "./common.js";

export function renderDos(spec: FigureSpec): string {
  const roles = Object.keys(spec.inputs).sort();
  if (roles.length === 0) {
    throw new SchemaError('dos figure needs at least one input (e.g. "panel_a")');
  }
  const panels = roles.map((role) => {
    const table = readCsv(spec.inputs[role]!);
    return {
      role,
      centers: denseColumn(table, "bin_center_mhz"),
      fock: denseColumn(table, "fock_density"),
      eigen: denseColumn(table, "eigen_density"),
      v: metaNumber(table, "v_mhz"),
      path: table.path,
    };
  });

  const width = Math.max(360, 340 * panels.length);
  const height = 400;
  const svg = new SvgCanvas(width, height);
  const panelW = (width - 40) / panels.length;
  svg.text(width / 2, 20, spec.title ?? "density of states: diagonal vs eigenvalue",
    { anchor: "middle", size: 13 });

  panels.forEach((p, pi) => {
    if (p.centers.length < 2) {
      throw new SchemaError(`${p.path}: need at least 2 bins`);
    }
    const binW = p.centers[1]! - p.centers[0]!;
    const xDomain = spec.xRange ?? [p.centers[0]! - binW / 2, p.centers[p.centers.length - 1]! + binW / 2];
    const yHi = Math.max(dataExtent(p.fock, "fock_density")[1],
                         dataExtent(p.eigen, "eigen_density")[1]);
    const yDomain = spec.yRange ?? padDomain(0, yHi, false);
    const left = 20 + pi * panelW + 52;
    const right = 20 + (pi + 1) * panelW - 14;
    const xs = new Scale(xDomain, [left, right], spec.xLog ?? false);
    const ys = new Scale(yDomain, [height - 56, 44], spec.yLog ?? false);

    // Fock bars
    for (let i = 0; i < p.centers.length; i++) {
      const x0 = Math.max(xs.map(p.centers[i]! - binW / 2), left);
      const x1 = Math.min(xs.map(p.centers[i]! + binW / 2), right);
      const y = ys.map(Math.min(p.fock[i]!, yDomain[1]));
      if (x1 <= x0) continue;
      svg.rect(x0, y, x1 - x0, ys.map(yDomain[0]) - y, "#a8c4e0", "#6d94bd");
    }
    // eigenvalue step line
    const steps: [number, number][] = [];
    for (let i = 0; i < p.centers.length; i++) {
      const y = ys.map(Math.min(p.eigen[i]!, yDomain[1]));
      steps.push([Math.max(xs.map(p.centers[i]! - binW / 2), left), y]);
      steps.push([Math.min(xs.map(p.centers[i]! + binW / 2), right), y]);
    }
    svg.path(steps, "#b3332e", 1.6);

    drawAxes(svg, xs, ys, {
      xLabel: "energy (MHz)",
      yLabel: pi === 0 ? "probability mass" : "",
      title: p.v !== null ? `V = ${p.v} MHz` : p.role,
    });
  });

  // shared legend
  svg.rect(width / 2 - 110, height - 20, 16, 10, "#a8c4e0", "#6d94bd");
  svg.text(width / 2 - 88, height - 11, "diagonal", { size: 10 });
  svg.line(width / 2 + 10, height - 15, width / 2 + 32, height - 15, "#b3332e", 2);
  svg.text(width / 2 + 38, height - 11, "eigenvalue", { size: 10 });
  return svg.render();
}
