import { describe, expect, it } from "vitest";
import {
  fitBounds,
  isSimpleQuad,
  pan,
  screenToWorld,
  signedMargin,
  worldToScreen,
  zoomAt,
} from "../src/geometry.js";
import type { Vertex } from "../src/types.js";

const SQUARE: Vertex[] = [
  [0, 0],
  [1, 0],
  [1, 1],
  [0, 1],
];
const FIG_QUAD: Vertex[] = [
  [-3.55, -27.0],
  [11.91, -6.6],
  [12.0, 0.0],
  [-8.5, 3.5],
];

describe("isSimpleQuad", () => {
  it("accepts convex and published quads", () => {
    expect(isSimpleQuad(SQUARE)).toBe(true);
    expect(isSimpleQuad(FIG_QUAD)).toBe(true);
  });

  it("rejects bowties and degenerate quads", () => {
    expect(
      isSimpleQuad([
        [0, 0],
        [1, 1],
        [1, 0],
        [0, 1],
      ]),
    ).toBe(false);
    expect(
      isSimpleQuad([
        [0, 0],
        [1, 0],
        [2, 0],
        [3, 0],
      ]),
    ).toBe(false);
  });
});

describe("signedMargin", () => {
  it("is positive inside, negative outside, distance-valued", () => {
    expect(signedMargin([0.5, 0.25], SQUARE)).toBeCloseTo(0.25, 12);
    expect(signedMargin([2.0, 0.5], SQUARE)).toBeCloseTo(-1.0, 12);
    expect(signedMargin(FIG_QUAD[0], FIG_QUAD)).toBeCloseTo(0.0, 9);
    expect(signedMargin([1000, 1000], FIG_QUAD)).toBeLessThan(0);
  });
});

describe("transforms", () => {
  it("round-trips world and screen coordinates", () => {
    const t = fitBounds(FIG_QUAD, 800, 600);
    for (const p of FIG_QUAD) {
      const back = screenToWorld(t, worldToScreen(t, p));
      expect(back[0]).toBeCloseTo(p[0], 9);
      expect(back[1]).toBeCloseTo(p[1], 9);
    }
  });

  it("fits points inside the viewport", () => {
    const t = fitBounds(FIG_QUAD, 800, 600, 30);
    for (const p of FIG_QUAD) {
      const [sx, sy] = worldToScreen(t, p);
      expect(sx).toBeGreaterThanOrEqual(29);
      expect(sx).toBeLessThanOrEqual(771);
      expect(sy).toBeGreaterThanOrEqual(29);
      expect(sy).toBeLessThanOrEqual(571);
    }
  });

  it("zoomAt keeps the anchor point fixed", () => {
    const t = fitBounds(FIG_QUAD, 800, 600);
    const anchorWorld = screenToWorld(t, [400, 300]);
    const zoomed = zoomAt(t, 1.5, 400, 300);
    const after = worldToScreen(zoomed, anchorWorld);
    expect(after[0]).toBeCloseTo(400, 9);
    expect(after[1]).toBeCloseTo(300, 9);
    expect(zoomed.scale).toBeCloseTo(1.5 * t.scale, 12);
  });

  it("pan shifts screen coordinates uniformly", () => {
    const t = fitBounds(FIG_QUAD, 800, 600);
    const moved = pan(t, 10, -20);
    const before = worldToScreen(t, [1, 1]);
    const after = worldToScreen(moved, [1, 1]);
    expect(after[0] - before[0]).toBeCloseTo(10, 12);
    expect(after[1] - before[1]).toBeCloseTo(-20, 12);
  });
});
