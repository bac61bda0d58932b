import { signedMargin } from "./geometry.js";
import type { TrapResult, Vertex } from "./types.js";

/**
 * Pure construction of the containment overlay draw list.  Rendering from
 * the same stored result always yields a deep-equal list, so re-renders
 * never mutate what the user is looking at.
 */
export interface DrawItem {
  kind: "seed" | "iterate" | "escaped" | "quad-edge" | "vertex-handle";
  points: Vertex[];
  color: string;
  size: number;
}

export const COLORS = {
  seeds: "#d62728",
  iterates: "#1f77b4",
  escaped: "#ff7f0e",
  quad: "#d62728",
  handle: "#2ca02c",
  scatter: "#1f77b4",
};

export function buildScatterLayer(points: number[][]): DrawItem[] {
  return [
    {
      kind: "iterate",
      points: points.map((p) => [p[1], p[2]] as Vertex),
      color: COLORS.scatter,
      size: 2,
    },
  ];
}

export function buildQuadLayer(quad: Vertex[], valid: boolean): DrawItem[] {
  return [
    {
      kind: "quad-edge",
      points: [...quad, quad[0]],
      color: valid ? COLORS.quad : "#000000",
      size: 1,
    },
    { kind: "vertex-handle", points: [...quad], color: COLORS.handle, size: 6 },
  ];
}

export interface ContainmentOverlay {
  items: DrawItem[];
  escapedCount: number;
}

/** Blue iterate clouds over red boundary seeds; escapes highlighted larger
 * and in a distinct color so a failed trap is visible at a glance. */
export function buildContainmentOverlay(
  result: TrapResult,
  quad: Vertex[],
): ContainmentOverlay {
  const items: DrawItem[] = [
    { kind: "seed", points: result.seeds, color: COLORS.seeds, size: 1.5 },
  ];
  let escapedCount = 0;
  const escaped: Vertex[] = [];
  const inside: Vertex[] = [];
  for (const cloud of result.clouds) {
    for (const p of cloud) {
      if (signedMargin(p, quad) > 0) {
        inside.push(p);
      } else {
        escaped.push(p);
        escapedCount += 1;
      }
    }
  }
  items.push({ kind: "iterate", points: inside, color: COLORS.iterates, size: 2 });
  if (escaped.length > 0) {
    items.push({ kind: "escaped", points: escaped, color: COLORS.escaped, size: 5 });
  }
  return { items, escapedCount };
}
