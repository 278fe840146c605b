/**
 * Figure specification: a small JSON document naming the figure kind, the
 * input CSV files by role, the output image path, and optional axis
 * overrides. Relative paths resolve against the spec file's directory.
 */

import { readFileSync } from "node:fs";
import { dirname, isAbsolute, resolve } from "node:path";
import { SchemaError } from "./csv.js";

export const FIGURE_KINDS = [
  "heatmap",
  "rmap",
  "timeseries",
  "exponents",
  "observables",
  "dos",
  "finite_size",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  /** role name -> CSV path (resolved) */
  inputs: Record<string, string>;
  /** resolved output image path (.svg) */
  output: string;
  title?: string;
  xRange?: [number, number];
  yRange?: [number, number];
  xLog?: boolean;
  yLog?: boolean;
  /** kind-specific knobs, passed through to the figure module */
  options: Record<string, unknown>;
}

function asRange(v: unknown, field: string): [number, number] {
  if (
    !Array.isArray(v) || v.length !== 2 ||
    typeof v[0] !== "number" || typeof v[1] !== "number"
  ) {
    throw new SchemaError(`spec field "${field}" must be [lo, hi]`);
  }
  if (!(v[0] < v[1])) {
    throw new SchemaError(`spec field "${field}" must have lo < hi`);
  }
  return [v[0], v[1]];
}

export function parseSpec(json: unknown, baseDir: string): FigureSpec {
  if (typeof json !== "object" || json === null || Array.isArray(json)) {
    throw new SchemaError("spec must be a JSON object");
  }
  const obj = json as Record<string, unknown>;
  const kind = obj["kind"];
  if (typeof kind !== "string" || !(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new SchemaError(
      `spec field "kind" must be one of ${FIGURE_KINDS.join(", ")}; got ${JSON.stringify(kind)}`);
  }
  const rawInputs = obj["inputs"];
  if (typeof rawInputs !== "object" || rawInputs === null || Array.isArray(rawInputs)) {
    throw new SchemaError('spec field "inputs" must be an object of role -> path');
  }
  const inputs: Record<string, string> = {};
  for (const [role, p] of Object.entries(rawInputs as Record<string, unknown>)) {
    if (typeof p !== "string" || p === "") {
      throw new SchemaError(`spec input "${role}" must be a non-empty path`);
    }
    inputs[role] = isAbsolute(p) ? p : resolve(baseDir, p);
  }
  const output = obj["output"];
  if (typeof output !== "string" || output === "") {
    throw new SchemaError('spec field "output" must be a non-empty path');
  }
  const spec: FigureSpec = {
    kind: kind as FigureKind,
    inputs,
    output: isAbsolute(output) ? output : resolve(baseDir, output),
    options: {},
  };
  if (obj["title"] !== undefined) {
    if (typeof obj["title"] !== "string") throw new SchemaError('spec field "title" must be a string');
    spec.title = obj["title"];
  }
  if (obj["x_range"] !== undefined) spec.xRange = asRange(obj["x_range"], "x_range");
  if (obj["y_range"] !== undefined) spec.yRange = asRange(obj["y_range"], "y_range");
  for (const f of ["x_log", "y_log"] as const) {
    if (obj[f] !== undefined && typeof obj[f] !== "boolean") {
      throw new SchemaError(`spec field "${f}" must be a boolean`);
    }
  }
  if (obj["x_log"] !== undefined) spec.xLog = obj["x_log"] as boolean;
  if (obj["y_log"] !== undefined) spec.yLog = obj["y_log"] as boolean;
  if (obj["options"] !== undefined) {
    const opt = obj["options"];
    if (typeof opt !== "object" || opt === null || Array.isArray(opt)) {
      throw new SchemaError('spec field "options" must be an object');
    }
    spec.options = opt as Record<string, unknown>;
  }
  const known = new Set([
    "kind", "inputs", "output", "title", "x_range", "y_range", "x_log", "y_log", "options",
  ]);
  for (const key of Object.keys(obj)) {
    if (!known.has(key)) throw new SchemaError(`unknown spec field "${key}"`);
  }
  return spec;
}

export function loadSpec(path: string): FigureSpec {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read spec ${path}: ${(err as Error).message}`);
  }
  let json: unknown;
  try {
    json = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`spec ${path} is not valid JSON: ${(err as Error).message}`);
  }
  return parseSpec(json, dirname(resolve(path)));
}

export function requireInput(spec: FigureSpec, role: string): string {
  const p = spec.inputs[role];
  if (p === undefined) {
    throw new SchemaError(`figure kind "${spec.kind}" needs input "${role}"`);
  }
  return p;
}

export function optNumber(spec: FigureSpec, key: string): number | undefined {
  const v = spec.options[key];
  if (v === undefined) return undefined;
  if (typeof v !== "number") throw new SchemaError(`option "${key}" must be a number`);
  return v;
}

export function optStringArray(spec: FigureSpec, key: string): string[] | undefined {
  const v = spec.options[key];
  if (v === undefined) return undefined;
  if (!Array.isArray(v) || v.some((x) => typeof x !== "string")) {
    throw new SchemaError(`option "${key}" must be an array of strings`);
  }
  return v as string[];
}
