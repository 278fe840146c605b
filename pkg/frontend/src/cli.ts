#!/usr/bin/env node
/**
 * Figure renderer CLI.
 *
 *   mbllab-render render --spec <figure.json> [--out <path>]
 *
 * Exit codes: 0 ok, 2 usage or schema problem, 1 anything else.
 */

import { SchemaError } from "./csv.js";
import { loadSpec } from "./spec.js";
import { renderSpec } from "./render.js";

const USAGE = `usage: mbllab-render render --spec <figure.json> [--out <path>]

Renders one figure described by a JSON spec to a deterministic SVG.
Relative paths inside the spec resolve against the spec file's directory.
`;

export function main(argv: string[]): number {
  if (argv.length === 0 || argv[0] === "-h" || argv[0] === "--help") {
    process.stdout.write(USAGE);
    return argv.length === 0 ? 2 : 0;
  }
  if (argv[0] !== "render") {
    process.stderr.write(`unknown command "${argv[0]}"\n${USAGE}`);
    return 2;
  }
  let specPath: string | undefined;
  let outOverride: string | undefined;
  for (let i = 1; i < argv.length; i++) {
    const a = argv[i]!;
    if (a === "--spec") {
      specPath = argv[++i];
    } else if (a === "--out") {
      outOverride = argv[++i];
    } else if (a === "-h" || a === "--help") {
      process.stdout.write(USAGE);
      return 0;
    } else {
      process.stderr.write(`unknown argument "${a}"\n${USAGE}`);
      return 2;
    }
  }
  if (specPath === undefined) {
    process.stderr.write(`render needs --spec <figure.json>\n${USAGE}`);
    return 2;
  }
  try {
    const spec = loadSpec(specPath);
    if (outOverride !== undefined) spec.output = outOverride;
    const written = renderSpec(spec);
    process.stdout.write(`wrote ${written}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`SchemaError: ${err.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

import { pathToFileURL } from "node:url";

if (process.argv[1] !== undefined &&
    import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
