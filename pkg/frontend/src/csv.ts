/**
 * Reader for the laboratory's CSV flavor: optional "# key: value" comment
 * lines, one header row, then data rows. Empty fields are genuine blanks
 * (unreachable cells, failed fits) and stay distinguishable from zero.
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface Table {
  /** comment lines with the leading "# " stripped */
  comments: string[];
  header: string[];
  /** column name -> raw string cells, "" for blanks */
  cols: Map<string, string[]>;
  nRows: number;
  /** source path, for error messages */
  path: string;
}

export function parseCsv(text: string, path = "<string>"): Table {
  const comments: string[] = [];
  let header: string[] = [];
  const cols = new Map<string, string[]>();
  let nRows = 0;
  for (const rawLine of text.split("\n")) {
    const line = rawLine.replace(/\r$/, "");
    if (line === "") continue;
    if (line.startsWith("#")) {
      comments.push(line.replace(/^#\s?/, ""));
      continue;
    }
    const parts = line.split(",");
    if (header.length === 0) {
      header = parts;
      for (const h of header) cols.set(h, []);
      continue;
    }
    if (parts.length !== header.length) {
      throw new SchemaError(
        `${path}: row ${nRows + 1} has ${parts.length} fields, header has ${header.length}`);
    }
    header.forEach((h, i) => cols.get(h)!.push(parts[i]!));
    nRows += 1;
  }
  if (header.length === 0) {
    throw new SchemaError(`${path}: no header row`);
  }
  return { comments, header, cols, nRows, path };
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseCsv(text, path);
}

/** Assert the table carries every column; the error names the first missing one. */
export function requireColumns(table: Table, names: string[]): void {
  for (const name of names) {
    if (!table.cols.has(name)) {
      throw new SchemaError(`${table.path}: missing column "${name}"`);
    }
  }
}

/** Numeric view of a column; blanks become null. */
export function numColumn(table: Table, name: string): (number | null)[] {
  requireColumns(table, [name]);
  return table.cols.get(name)!.map((cell) => {
    if (cell === "") return null;
    const v = Number(cell);
    if (Number.isNaN(v)) {
      throw new SchemaError(`${table.path}: column "${name}" has non-numeric cell "${cell}"`);
    }
    return v;
  });
}

/** Numeric column that must not contain blanks. */
export function denseColumn(table: Table, name: string): number[] {
  const vals = numColumn(table, name);
  vals.forEach((v, i) => {
    if (v === null) {
      throw new SchemaError(`${table.path}: column "${name}" has a blank at row ${i + 1}`);
    }
  });
  return vals as number[];
}

/** Comment metadata as key -> value for "key: value" comment lines. */
export function commentMeta(table: Table): Map<string, string> {
  const meta = new Map<string, string>();
  for (const c of table.comments) {
    const idx = c.indexOf(": ");
    if (idx > 0) meta.set(c.slice(0, idx), c.slice(idx + 2));
  }
  return meta;
}
