import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { parseConfig, renderConfig } from "../src/preset.js";
import { initialState, loadPresetText, setIters } from "../src/state.js";

// The shipped CLI presets are the byte-compatibility contract: loading one
// into the explorer and exporting it must reproduce the file exactly, so a
// CLI run of the export reproduces the on-screen run.
function readPreset(name: string): string {
  return readFileSync(
    new URL(`../../src/gahkit/presets/${name}.cfg`, import.meta.url),
    "utf-8",
  );
}

describe("preset round-trip", () => {
  it("re-exports fig3 byte-identically", () => {
    const text = readPreset("fig3");
    const state = loadPresetText(initialState(), text);
    expect(renderConfig(state)).toBe(text);
  });

  it("re-exports fig4 byte-identically", () => {
    const text = readPreset("fig4");
    const state = loadPresetText(initialState(), text);
    expect(renderConfig(state)).toBe(text);
  });

  it("re-exports fig2 (no quad section) byte-identically", () => {
    const text = readPreset("fig2");
    const state = loadPresetText(initialState(), text);
    expect(state.quad).toBeNull();
    expect(renderConfig(state)).toBe(text);
  });

  it("parses fig3 fields", () => {
    const cfg = parseConfig(readPreset("fig3"));
    expect(cfg.system).toBe("rossler");
    expect(cfg.params).toEqual({ a: 0.2, b: 0.1, c: 10.0 });
    expect(cfg.plane.angle).toBeCloseTo((2 * Math.PI) / 5, 15);
    expect(cfg.plane.value).toBe(5.0);
    expect(cfg.quad).toEqual([
      [-3.55, -27.0],
      [11.91, -6.6],
      [12.0, 0.0],
      [-8.5, 3.5],
    ]);
    expect(cfg.run.pointsPerEdge).toBe(1000);
    expect(cfg.run.iters).toBe(1);
  });

  it("reflects state edits in the export", () => {
    const state = setIters(loadPresetText(initialState(), readPreset("fig3")), 5);
    const text = renderConfig(state);
    expect(text).toContain("iters = 5");
    expect(text).toBe(readPreset("fig4"));
  });

  it("rejects malformed quads", () => {
    expect(() => parseConfig("[quad]\nvertices = 1,2:3,4\n")).toThrow();
  });
});
