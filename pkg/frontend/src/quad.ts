import type { Transform } from "./geometry.js";
import { worldToScreen } from "./geometry.js";
import type { Vertex } from "./types.js";

/** Hit-test quad vertices in screen space (pixel tolerance). */
export function hitVertex(
  quad: Vertex[],
  transform: Transform,
  sx: number,
  sy: number,
  tolerancePx = 8,
): number {
  for (let i = 0; i < quad.length; i++) {
    const [vx, vy] = worldToScreen(transform, quad[i]);
    if (Math.hypot(vx - sx, vy - sy) <= tolerancePx) return i;
  }
  return -1;
}
