import type { Vertex } from "./types.js";

function cross2(ax: number, ay: number, bx: number, by: number): number {
  return ax * by - ay * bx;
}

function segmentsCross(p1: Vertex, p2: Vertex, p3: Vertex, p4: Vertex): boolean {
  const d1 = cross2(p4[0] - p3[0], p4[1] - p3[1], p1[0] - p3[0], p1[1] - p3[1]);
  const d2 = cross2(p4[0] - p3[0], p4[1] - p3[1], p2[0] - p3[0], p2[1] - p3[1]);
  const d3 = cross2(p2[0] - p1[0], p2[1] - p1[1], p3[0] - p1[0], p3[1] - p1[1]);
  const d4 = cross2(p2[0] - p1[0], p2[1] - p1[1], p4[0] - p1[0], p4[1] - p1[1]);
  return d1 > 0 !== d2 > 0 && d3 > 0 !== d4 > 0;
}

/** A quadrilateral is simple when its two non-adjacent edge pairs do not cross. */
export function isSimpleQuad(v: Vertex[]): boolean {
  if (v.length !== 4) return false;
  if (segmentsCross(v[0], v[1], v[2], v[3])) return false;
  if (segmentsCross(v[1], v[2], v[3], v[0])) return false;
  // degenerate (all collinear) quads are not usable regions
  const area =
    cross2(v[1][0] - v[0][0], v[1][1] - v[0][1], v[2][0] - v[0][0], v[2][1] - v[0][1]) +
    cross2(v[2][0] - v[0][0], v[2][1] - v[0][1], v[3][0] - v[0][0], v[3][1] - v[0][1]);
  return Math.abs(area) > 1e-12;
}

function segmentDistance(p: Vertex, a: Vertex, b: Vertex): number {
  const abx = b[0] - a[0];
  const aby = b[1] - a[1];
  const denom = abx * abx + aby * aby;
  const t = denom === 0 ? 0 : Math.max(0, Math.min(1, ((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / denom));
  const dx = p[0] - (a[0] + t * abx);
  const dy = p[1] - (a[1] + t * aby);
  return Math.hypot(dx, dy);
}

/** Signed distance to the polygon boundary: positive inside (winding rule). */
export function signedMargin(p: Vertex, quad: Vertex[]): number {
  let wn = 0;
  const n = quad.length;
  for (let i = 0; i < n; i++) {
    const a = quad[i];
    const b = quad[(i + 1) % n];
    const isLeft = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
    if (a[1] <= p[1]) {
      if (b[1] > p[1] && isLeft > 0) wn += 1;
    } else if (b[1] <= p[1] && isLeft < 0) {
      wn -= 1;
    }
  }
  let dist = Infinity;
  for (let i = 0; i < n; i++) {
    dist = Math.min(dist, segmentDistance(p, quad[i], quad[(i + 1) % n]));
  }
  return wn !== 0 ? dist : -dist;
}

/** World <-> screen mapping with uniform scale (y axis flipped for canvas). */
export interface Transform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export function worldToScreen(t: Transform, p: Vertex): Vertex {
  return [t.offsetX + t.scale * p[0], t.offsetY - t.scale * p[1]];
}

export function screenToWorld(t: Transform, p: Vertex): Vertex {
  return [(p[0] - t.offsetX) / t.scale, (t.offsetY - p[1]) / t.scale];
}

export function fitBounds(
  points: Vertex[],
  width: number,
  height: number,
  padding = 30,
): Transform {
  let xmin = Infinity;
  let xmax = -Infinity;
  let ymin = Infinity;
  let ymax = -Infinity;
  for (const [x, y] of points) {
    xmin = Math.min(xmin, x);
    xmax = Math.max(xmax, x);
    ymin = Math.min(ymin, y);
    ymax = Math.max(ymax, y);
  }
  if (!Number.isFinite(xmin) || xmax === xmin || ymax === ymin) {
    return { scale: 1, offsetX: width / 2, offsetY: height / 2 };
  }
  const scale = Math.min(
    (width - 2 * padding) / (xmax - xmin),
    (height - 2 * padding) / (ymax - ymin),
  );
  const cx = (xmin + xmax) / 2;
  const cy = (ymin + ymax) / 2;
  return {
    scale,
    offsetX: width / 2 - scale * cx,
    offsetY: height / 2 + scale * cy,
  };
}

/** Zoom about a fixed screen anchor; the anchored world point stays put. */
export function zoomAt(t: Transform, factor: number, sx: number, sy: number): Transform {
  const scale = t.scale * factor;
  return {
    scale,
    offsetX: sx - factor * (sx - t.offsetX),
    offsetY: sy - factor * (sy - t.offsetY),
  };
}

export function pan(t: Transform, dx: number, dy: number): Transform {
  return { scale: t.scale, offsetX: t.offsetX + dx, offsetY: t.offsetY + dy };
}
