import type { Transform } from "./geometry.js";
import { worldToScreen } from "./geometry.js";
import type { DrawItem } from "./overlay.js";

/** Immediate-mode rendering of draw lists onto a 2D canvas. */
export function render(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  transform: Transform,
  layers: DrawItem[][],
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);
  for (const layer of layers) {
    for (const item of layer) {
      if (item.kind === "quad-edge") {
        ctx.strokeStyle = item.color;
        ctx.lineWidth = item.size;
        ctx.beginPath();
        item.points.forEach((p, i) => {
          const [sx, sy] = worldToScreen(transform, p);
          if (i === 0) ctx.moveTo(sx, sy);
          else ctx.lineTo(sx, sy);
        });
        ctx.stroke();
      } else if (item.kind === "vertex-handle") {
        ctx.strokeStyle = item.color;
        ctx.lineWidth = 2;
        for (const p of item.points) {
          const [sx, sy] = worldToScreen(transform, p);
          ctx.strokeRect(sx - item.size, sy - item.size, 2 * item.size, 2 * item.size);
        }
      } else {
        ctx.fillStyle = item.color;
        for (const p of item.points) {
          const [sx, sy] = worldToScreen(transform, p);
          ctx.beginPath();
          ctx.arc(sx, sy, item.size / 2, 0, 2 * Math.PI);
          ctx.fill();
        }
      }
    }
  }
}
