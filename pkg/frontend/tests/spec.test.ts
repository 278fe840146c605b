import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { SchemaError } from "../src/csv.js";
import { loadSpec, parseSpec } from "../src/spec.js";

const BASE = "/data/run";

describe("parseSpec", () => {
  it("resolves relative paths against the spec directory", () => {
    const spec = parseSpec({
      kind: "heatmap",
      inputs: { heatmap: "summary/heatmap.csv" },
      output: "../figs/h.svg",
    }, BASE);
    expect(spec.inputs["heatmap"]).toBe("/data/run/summary/heatmap.csv");
    expect(spec.output).toBe("/data/figs/h.svg");
  });

  it("keeps absolute paths as given", () => {
    const spec = parseSpec({
      kind: "rmap",
      inputs: { rmap: "/abs/rmap_grid.csv" },
      output: "/abs/out.svg",
    }, BASE);
    expect(spec.inputs["rmap"]).toBe("/abs/rmap_grid.csv");
    expect(spec.output).toBe("/abs/out.svg");
  });

  it("accepts axis ranges, log flags, title, options", () => {
    const spec = parseSpec({
      kind: "timeseries",
      inputs: { average: "a.csv" },
      output: "o.svg",
      title: "demo",
      x_range: [10, 1500],
      y_range: [0.01, 1],
      x_log: true,
      y_log: true,
      options: { eps: 0.5 },
    }, BASE);
    expect(spec.xRange).toEqual([10, 1500]);
    expect(spec.yLog).toBe(true);
    expect(spec.options["eps"]).toBe(0.5);
  });

  it.each([
    [{ inputs: {}, output: "o.svg" }, /"kind"/],
    [{ kind: "pie", inputs: {}, output: "o.svg" }, /"kind"/],
    [{ kind: "heatmap", output: "o.svg" }, /"inputs"/],
    [{ kind: "heatmap", inputs: { heatmap: "" }, output: "o.svg" }, /non-empty path/],
    [{ kind: "heatmap", inputs: {}, output: 7 }, /"output"/],
    [{ kind: "heatmap", inputs: {}, output: "o.svg", x_range: [5, 5] }, /lo < hi/],
    [{ kind: "heatmap", inputs: {}, output: "o.svg", x_log: "yes" }, /"x_log"/],
    [{ kind: "heatmap", inputs: {}, output: "o.svg", extra: 1 }, /unknown spec field "extra"/],
  ])("rejects malformed spec %#", (bad, msg) => {
    expect(() => parseSpec(bad, BASE)).toThrow(SchemaError);
    expect(() => parseSpec(bad, BASE)).toThrow(msg);
  });
});

describe("loadSpec", () => {
  it("reads a JSON file and resolves against its directory", () => {
    const dir = mkdtempSync(join(tmpdir(), "spec-"));
    const p = join(dir, "fig.json");
    writeFileSync(p, JSON.stringify({
      kind: "dos",
      inputs: { panel_a: "dos_v4.csv" },
      output: "out/dos.svg",
    }));
    const spec = loadSpec(p);
    expect(spec.inputs["panel_a"]).toBe(join(dir, "dos_v4.csv"));
    expect(spec.output).toBe(join(dir, "out", "dos.svg"));
  });

  it("raises SchemaError on invalid JSON", () => {
    const dir = mkdtempSync(join(tmpdir(), "spec-"));
    const p = join(dir, "bad.json");
    writeFileSync(p, "{not json");
    expect(() => loadSpec(p)).toThrow(/not valid JSON/);
  });

  it("raises SchemaError on a missing file", () => {
    expect(() => loadSpec("/nonexistent/fig.json")).toThrow(/cannot read spec/);
  });
});
