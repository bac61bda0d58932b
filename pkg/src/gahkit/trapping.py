"""Quadrilateral trapping-region verification on a Poincare section.

A candidate region traps when every boundary seed's return-map image lands
strictly inside it (open containment: boundary hits count as escapes).
Iterating the map on the trapped region accumulates toward the attractor
the region encloses.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dynsys import IntegratorConfig
from .section import BatchIterates, SectionPlane, iterate_map_batch

__all__ = [
    "Quadrilateral",
    "IterationStats",
    "ContainmentReport",
    "TrappingResult",
    "discretize_edges",
    "point_in_polygon",
    "signed_margin",
    "verify_trapping",
    "approximate_attractor",
    "convex_hull_contains",
    "export_clouds_csv",
]

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class Quadrilateral:
    """Four ordered planar vertices forming a simple polygon."""

    vertices: tuple

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.shape != (4, 2) or not np.all(np.isfinite(v)):
            raise ValueError("need 4 finite planar vertices")
        object.__setattr__(self, "vertices", tuple(map(tuple, v)))
        if self._collinear(v):
            raise ValueError("vertices are collinear")
        if self._self_intersects(v):
            raise ValueError("quadrilateral is self-intersecting")

    @staticmethod
    def _collinear(v) -> bool:
        for i in range(4):
            a, b, c = v[i], v[(i + 1) % 4], v[(i + 2) % 4]
            if abs(_cross2(b - a, c - a)) > 1e-14 * (1 + np.abs(v).max() ** 2):
                return False
        return True

    @staticmethod
    def _self_intersects(v) -> bool:
        # Only the two non-adjacent edge pairs can cross in a quadrilateral.
        return _segments_cross(v[0], v[1], v[2], v[3]) or _segments_cross(
            v[1], v[2], v[3], v[0]
        )

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def centroid(self) -> np.ndarray:
        return self.as_array().mean(axis=0)

    def scaled(self, factor: float) -> "Quadrilateral":
        """Same shape, scaled about the centroid."""
        v = self.as_array()
        c = v.mean(axis=0)
        return Quadrilateral(tuple(map(tuple, c + factor * (v - c))))


def _cross2(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _segments_cross(p1, p2, p3, p4) -> bool:
    d1 = _cross2(p4 - p3, p1 - p3)
    d2 = _cross2(p4 - p3, p2 - p3)
    d3 = _cross2(p2 - p1, p3 - p1)
    d4 = _cross2(p2 - p1, p4 - p1)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def discretize_edges(q: Quadrilateral, points_per_edge: int) -> np.ndarray:
    """Uniform boundary sampling: each directed edge contributes its start
    plus ``points_per_edge`` further points, so corners appear exactly once
    and the total is ``4 * (points_per_edge + 1)``."""
    if points_per_edge < 0:
        raise ValueError("points_per_edge must be >= 0")
    v = q.as_array()
    pts = []
    n = points_per_edge
    for i in range(4):
        p0, p1 = v[i], v[(i + 1) % 4]
        for j in range(n + 1):
            pts.append(p0 + (j / (n + 1)) * (p1 - p0))
    return np.asarray(pts)


def _segment_distance(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    d = p - (a + t * ab)
    return float(math.hypot(d[0], d[1]))


def signed_margin(p, q: Quadrilateral) -> float:
    """Signed distance to the polygon boundary: positive inside."""
    p = np.asarray(p, dtype=float)
    v = q.as_array()
    wn = 0
    for i in range(4):
        a, b = v[i], v[(i + 1) % 4]
        is_left = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])
        if a[1] <= p[1]:
            if b[1] > p[1] and is_left > 0:
                wn += 1
        elif b[1] <= p[1] and is_left < 0:
            wn -= 1
    dist = min(_segment_distance(p, v[i], v[(i + 1) % 4]) for i in range(4))
    return dist if wn != 0 else -dist


def point_in_polygon(p, q: Quadrilateral):
    """Winding-number classification with signed margin.

    Returns ``(where, margin)`` with ``where`` one of ``'inside'``,
    ``'boundary'`` or ``'outside'``.
    """
    m = signed_margin(p, q)
    if abs(m) < BOUNDARY_TOL:
        return "boundary", m
    return ("inside" if m > 0 else "outside"), m


def _margins(points, q: Quadrilateral) -> np.ndarray:
    return np.array([signed_margin(p, q) for p in np.asarray(points)])


@dataclass(frozen=True)
class IterationStats:
    returned: int
    inside: int
    escaped: int
    no_return: int
    min_margin: float

    def to_dict(self) -> dict:
        return {
            "returned": self.returned,
            "inside": self.inside,
            "escaped": self.escaped,
            "no_return": self.no_return,
            "min_margin": self.min_margin,
        }


@dataclass
class ContainmentReport:
    """Per-iteration classification counts for a trapping-verification run."""

    total_seeds: int
    per_iteration: list

    def passes(self, max_no_return_frac: float = 0.005) -> bool:
        """Trapping verdict: zero escapes, bounded integration dropouts."""
        for stats in self.per_iteration:
            if stats.escaped > 0:
                return False
            if stats.no_return > max_no_return_frac * self.total_seeds:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "total_seeds": self.total_seeds,
            "trapping_verified": self.passes(),
            "per_iteration": [s.to_dict() for s in self.per_iteration],
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


@dataclass
class TrappingResult:
    report: ContainmentReport
    seeds: np.ndarray          # (n, 2) boundary seeds
    clouds: list = field(default_factory=list)  # per-iteration (m_i, 2) images
    batch: BatchIterates | None = None


def verify_trapping(q: Quadrilateral, plane: SectionPlane, rhs, cfg: IntegratorConfig,
                    points_per_edge: int = 1000, k: int = 1) -> TrappingResult:
    """Iterate every boundary seed ``k`` times and classify each image.

    Per-seed integration dropouts are reported, never fatal.  Boundary hits
    of the open region count as escapes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    seeds = discretize_edges(q, points_per_edge)
    batch = iterate_map_batch(seeds, plane, rhs, cfg, k)
    planar = batch.planar(plane)  # (k, n, 2)

    total = len(seeds)
    per_iter = []
    clouds = []
    for i in range(k):
        have = ~np.isnan(planar[i, :, 0])
        images = planar[i][have]
        margins = _margins(images, q) if len(images) else np.empty(0)
        inside = int(np.sum(margins > BOUNDARY_TOL))
        returned = int(np.sum(have))
        per_iter.append(
            IterationStats(
                returned=returned,
                inside=inside,
                escaped=returned - inside,
                no_return=total - returned,
                min_margin=float(margins.min()) if margins.size else float("nan"),
            )
        )
        clouds.append(images)
    report = ContainmentReport(total_seeds=total, per_iteration=per_iter)
    return TrappingResult(report=report, seeds=seeds, clouds=clouds, batch=batch)


def approximate_attractor(q: Quadrilateral, plane: SectionPlane, rhs,
                          cfg: IntegratorConfig, points_per_edge: int = 1000,
                          k: int = 5, k_burn: int = 2) -> np.ndarray:
    """Late-iterate image cloud, the numerical stand-in for the attractor.

    Runs the trapping pipeline and unions the clouds after ``k_burn``
    burn-in iterations.  Deterministic for fixed inputs.
    """
    if not 0 <= k_burn < k:
        raise ValueError("need 0 <= k_burn < k")
    result = verify_trapping(q, plane, rhs, cfg, points_per_edge=points_per_edge, k=k)
    late = result.clouds[k_burn:]
    return np.concatenate([c for c in late if len(c)], axis=0)


def convex_hull_contains(points, cloud, tol: float = 1e-9) -> bool:
    """True when every point lies in the convex hull of ``cloud``."""
    from scipy.spatial import ConvexHull

    hull = ConvexHull(np.asarray(cloud))
    eqs = hull.equations  # rows (a, b, c): a x + b y + c <= 0 inside
    pts = np.asarray(points)
    vals = pts @ eqs[:, :2].T + eqs[:, 2]
    return bool(np.all(vals <= tol))


def export_clouds_csv(clouds, path, start_iteration: int = 1) -> None:
    """Write per-iteration image clouds as CSV ``iter,x_hat,y_hat``."""
    with open(path, "w", newline="") as fh:
        fh.write("iter,x_hat,y_hat\n")
        for i, cloud in enumerate(clouds, start=start_iteration):
            for u, v in np.asarray(cloud):
                fh.write(f"{i},{float(u)!r},{float(v)!r}\n")
