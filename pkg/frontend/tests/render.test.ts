import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { parseCsv, SchemaError } from "../src/csv.js";
import { loadSpec, parseSpec } from "../src/spec.js";
import { renderToString } from "../src/render.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const EXAMPLES = resolve(HERE, "..", "examples");
const GOLDEN = resolve(HERE, "..", "golden", "summary");

const EXAMPLE_SPECS = [
  "fig_heatmap.json",
  "fig_rmap.json",
  "fig_timeseries.json",
  "fig_exponents.json",
  "fig_observables.json",
  "fig_dos.json",
  "fig_finite_size.json",
  "fig_pr_avg.json",
  "fig_fq_avg.json",
];

describe("example figures", () => {
  it.each(EXAMPLE_SPECS)("%s renders to plausible SVG", (name) => {
    const svg = renderToString(loadSpec(join(EXAMPLES, name)));
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
    expect(svg.length).toBeGreaterThan(2000);
    // every axis frame brings at least one text label
    expect(svg).toContain("<text");
  });

  it.each(EXAMPLE_SPECS)("%s output is byte-deterministic", (name) => {
    const spec = loadSpec(join(EXAMPLES, name));
    const a = renderToString(spec);
    const b = renderToString(loadSpec(join(EXAMPLES, name)));
    expect(b).toBe(a);
  });

  it("contains no timestamps or random ids", () => {
    for (const name of EXAMPLE_SPECS) {
      const svg = renderToString(loadSpec(join(EXAMPLES, name)));
      expect(svg).not.toMatch(/20\d\d-\d\d-\d\d/);
      expect(svg).not.toMatch(/id="[0-9a-f]{8}-/);
    }
  });
});

describe("gap cells", () => {
  it("renders unreachable heatmap cells as crossed blanks", () => {
    const table = parseCsv(readFileSync(join(GOLDEN, "heatmap.csv"), "utf8"));
    const blanks = table.cols.get("i_gen_mean")!.filter((c) => c === "").length;
    expect(blanks).toBeGreaterThan(0);
    const svg = renderToString(loadSpec(join(EXAMPLES, "fig_heatmap.json")));
    // two cross strokes per blank cell, color reserved for blanks
    const crosses = (svg.match(/stroke="#bbbbbb"/g) ?? []).length;
    expect(crosses).toBe(2 * blanks);
  });

  it("renders absent gap-ratio bins as blanks", () => {
    const table = parseCsv(readFileSync(join(GOLDEN, "rmap_grid.csv"), "utf8"));
    const centers = new Set(table.cols.get("eps_bin_center"));
    const vs = new Set(table.cols.get("v_mhz"));
    const absent = centers.size * vs.size - table.nRows;
    expect(absent).toBeGreaterThan(0);
    const svg = renderToString(loadSpec(join(EXAMPLES, "fig_rmap.json")));
    const crosses = (svg.match(/stroke="#bbbbbb"/g) ?? []).length;
    expect(crosses).toBe(2 * absent);
  });

  it("skips finite-size rows whose final imbalance is blank", () => {
    const table = parseCsv(readFileSync(join(GOLDEN, "finite_size.csv"), "utf8"));
    const blanks = table.cols.get("i_gen_final")!.filter((c) => c === "").length;
    expect(blanks).toBeGreaterThan(0);
    // renders despite the blank rows
    const svg = renderToString(loadSpec(join(EXAMPLES, "fig_finite_size.json")));
    expect(svg).toContain("</svg>");
  });
});

describe("schema violations", () => {
  function droppedColumnCopy(src: string, col: string): string {
    const table = parseCsv(readFileSync(src, "utf8"), src);
    const keep = table.header.filter((h) => h !== col);
    const lines = [keep.join(",")];
    for (let i = 0; i < table.nRows; i++) {
      lines.push(keep.map((h) => table.cols.get(h)![i]!).join(","));
    }
    const dir = mkdtempSync(join(tmpdir(), "dropped-"));
    const p = join(dir, "truncated.csv");
    writeFileSync(p, lines.join("\n") + "\n");
    return p;
  }

  it("fails with a SchemaError naming the dropped heatmap column", () => {
    const p = droppedColumnCopy(join(GOLDEN, "heatmap.csv"), "i_gen_mean");
    const spec = parseSpec({
      kind: "heatmap",
      inputs: { heatmap: p },
      output: "/tmp/never.svg",
      options: { t_ns: 1000 },
    }, "/tmp");
    expect(() => renderToString(spec)).toThrow(SchemaError);
    expect(() => renderToString(spec)).toThrow('missing column "i_gen_mean"');
  });

  it("fails with a SchemaError naming the dropped fits column", () => {
    const p = droppedColumnCopy(join(GOLDEN, "fits.csv"), "xi_err");
    const spec = parseSpec({
      kind: "exponents",
      inputs: { fits: p },
      output: "/tmp/never.svg",
    }, "/tmp");
    expect(() => renderToString(spec)).toThrow('missing column "xi_err"');
  });

  it("names a missing input role", () => {
    const spec = parseSpec({
      kind: "timeseries",
      inputs: { fits: join(GOLDEN, "fits.csv") },
      output: "/tmp/never.svg",
    }, "/tmp");
    expect(() => renderToString(spec)).toThrow('needs input "average"');
  });

  it("rejects an unknown observable option", () => {
    const spec = parseSpec({
      kind: "timeseries",
      inputs: { average: join(GOLDEN, "avg_series.csv") },
      output: "/tmp/never.svg",
      options: { observable: "norm" },
    }, "/tmp");
    expect(() => renderToString(spec)).toThrow(/"observable" must be one of/);
  });

  it("rejects a snapshot time absent from the heatmap", () => {
    const spec = parseSpec({
      kind: "heatmap",
      inputs: { heatmap: join(GOLDEN, "heatmap.csv") },
      output: "/tmp/never.svg",
      options: { t_ns: 123.0 },
    }, "/tmp");
    expect(() => renderToString(spec)).toThrow(/t_ns=123 not in/);
  });
});
