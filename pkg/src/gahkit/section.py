"""Poincare section machinery: planes, crossings, return maps, fixed points.

A section is specified in a rotated frame: rotating the section by ``angle``
is realized by rotating the flow by ``-angle``, after which the cut is a
constant-coordinate plane.  All plane-frame quantities ("hat" coordinates)
follow that convention, which matches plotting the flow multiplied by the
rotation matrix on the right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rk45
from .dynsys import IntegratorConfig, State3, rotate_points
from .errors import (
    EmptyTrajectory,
    NoConvergence,
    NoReturn,
    SingularJacobian,
)

__all__ = [
    "SectionPlane",
    "Crossing",
    "ReturnMapResult",
    "IterateOutcome",
    "BatchIterates",
    "find_crossings",
    "first_return",
    "iterate_map",
    "iterate_map_batch",
    "FixedPointResult",
    "fixed_point_of_map",
    "find_fixed_point",
    "close_return_guess",
    "export_crossings_csv",
]

_DIRECTIONS = {"ascending": 1, "descending": -1, "both": 0}


@dataclass(frozen=True)
class SectionPlane:
    """A rotated constant-coordinate section.

    ``cut_coord`` indexes (1-based) the rotated-frame coordinate that is held
    at ``cut_value``; the remaining two coordinates, in index order, chart
    the plane.
    """

    rotation_angle: float = 0.0
    rotation_axis: str = "z"
    cut_coord: int = 3
    cut_value: float = 0.0
    direction: str = "both"

    def __post_init__(self):
        if self.rotation_axis not in ("x", "y", "z"):
            raise ValueError(f"rotation_axis must be x|y|z, got {self.rotation_axis!r}")
        if self.cut_coord not in (1, 2, 3):
            raise ValueError(f"cut_coord must be 1, 2 or 3, got {self.cut_coord!r}")
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"direction must be one of {sorted(_DIRECTIONS)}")
        if not math.isfinite(self.rotation_angle) or not math.isfinite(self.cut_value):
            raise ValueError("rotation_angle and cut_value must be finite")

    @property
    def direction_sign(self) -> int:
        return _DIRECTIONS[self.direction]

    @property
    def _k(self) -> int:
        return self.cut_coord - 1

    @property
    def plane_axes(self) -> tuple[int, int]:
        """Rotated-frame indices of the two in-plane coordinates."""
        return tuple(i for i in range(3) if i != self._k)

    def to_plane_frame(self, points):
        """World -> rotated-frame coordinates (flow rotated by -angle)."""
        return rotate_points(points, -self.rotation_angle, self.rotation_axis)

    def to_world_frame(self, points):
        return rotate_points(points, self.rotation_angle, self.rotation_axis)

    def residual(self, world_points):
        """Signed distance of world points from the section, in the cut coordinate."""
        hat = np.asarray(self.to_plane_frame(world_points))
        return hat[..., self._k] - self.cut_value

    def embed(self, uv) -> np.ndarray:
        """Lift in-plane (u, v) coordinates to rotated-frame 3-vectors."""
        uv = np.asarray(uv, dtype=float)
        scalar = uv.ndim == 1
        uv = np.atleast_2d(uv)
        out = np.empty((uv.shape[0], 3))
        i, j = self.plane_axes
        out[:, i] = uv[:, 0]
        out[:, j] = uv[:, 1]
        out[:, self._k] = self.cut_value
        return out[0] if scalar else out

    def project(self, hat_points) -> np.ndarray:
        """Drop the cut coordinate of rotated-frame points."""
        hat = np.asarray(hat_points, dtype=float)
        i, j = self.plane_axes
        return np.stack([hat[..., i], hat[..., j]], axis=-1)

    def to_dict(self) -> dict:
        return {
            "angle": self.rotation_angle,
            "axis": self.rotation_axis,
            "coord": self.cut_coord,
            "value": self.cut_value,
            "direction": self.direction,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SectionPlane":
        return cls(
            rotation_angle=float(d["angle"]),
            rotation_axis=str(d.get("axis", "z")),
            cut_coord=int(d.get("coord", 3)),
            cut_value=float(d["value"]),
            direction=str(d.get("direction", "both")),
        )


@dataclass(frozen=True)
class Crossing:
    """One refined section crossing of a trajectory (rotated frame)."""

    t: float
    point: State3
    bracket: tuple[int, int]
    direction: str


@dataclass(frozen=True)
class ReturnMapResult:
    """One application of the first-return map (all in the rotated frame)."""

    seed: State3
    image: State3
    flight_time: float


@dataclass
class IterateOutcome:
    """Chained return-map results; ``failure_index`` marks an early stop."""

    results: list
    failure_index: int | None = None

    @property
    def complete(self) -> bool:
        return self.failure_index is None


def _sign_changes(g: np.ndarray):
    """Bracket indices (i, j) with a strict sign change between samples i, j.

    Samples lying exactly on the section join the neighbouring run: a zero
    sample between opposite signs is a crossing, a touch without sign change
    is a tangency and is ignored.
    """
    s = np.sign(g).astype(int)
    out = []
    prev_idx = None  # index of the last nonzero sign
    for i, si in enumerate(s):
        if si == 0:
            continue
        if prev_idx is not None and s[prev_idx] != si:
            out.append((prev_idx, i))
        prev_idx = i
    return out


def find_crossings(traj, plane: SectionPlane, refine: str = "dense_bisection"):
    """All strict sign-change crossings of a trajectory with a section.

    ``refine='linear'`` interpolates between the bracketing samples;
    ``refine='dense_bisection'`` bisects the integrator's dense output
    until the cut-coordinate residual falls below 1e-10.
    """
    if refine not in ("linear", "dense_bisection"):
        raise ValueError(f"unknown refine mode {refine!r}")
    if len(traj) < 2:
        raise EmptyTrajectory("need at least 2 samples to detect crossings")
    g = plane.residual(traj.ys)
    want = plane.direction_sign
    crossings = []
    for i, j in _sign_changes(g):
        direction = "ascending" if g[j] > g[i] else "descending"
        if want == 1 and direction != "ascending":
            continue
        if want == -1 and direction != "descending":
            continue
        if j - i > 1:
            # The middle sample sits exactly on the section.
            mid = i + 1
            t_star = traj.ts[mid]
            hat = plane.to_plane_frame(traj.ys[mid])
        elif refine == "linear":
            th = g[i] / (g[i] - g[j])
            t_star = traj.ts[i] + th * (traj.ts[j] - traj.ts[i])
            world = traj.ys[i] + th * (traj.ys[j] - traj.ys[i])
            hat = plane.to_plane_frame(world)
        else:
            if traj.dense is None:
                raise ValueError("dense_bisection needs a trajectory with dense output")
            t_star, world = _bisect_step(traj, i, plane, g[j] > g[i])
            hat = plane.to_plane_frame(world)
        crossings.append(
            Crossing(
                t=float(t_star),
                point=State3.from_array(hat),
                bracket=(int(i), int(j)),
                direction=direction,
            )
        )
    return crossings


def _bisect_step(traj, i, plane: SectionPlane, ascending: bool, iters: int = 70):
    """Bisect the Hermite interpolant of accepted step ``i`` to the section."""
    d = traj.dense
    lo, hi = 0.0, 1.0
    arrival = 1.0 if ascending else -1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gm = float(plane.residual(d.eval(i, mid)))
        if math.copysign(1.0, gm) == arrival and gm != 0.0:
            hi = mid
        else:
            lo = mid
    world = d.eval(i, hi)
    return d.t0[i] + hi * d.h[i], world


def _seed_world(seed: State3, plane: SectionPlane, tol: float = 1e-9) -> np.ndarray:
    hat = seed.to_array()
    if abs(hat[plane.cut_coord - 1] - plane.cut_value) > tol:
        raise ValueError(
            f"seed is off the section by {hat[plane.cut_coord - 1] - plane.cut_value:.3e}"
        )
    return plane.to_world_frame(hat)


def _t_min(cfg: IntegratorConfig) -> float:
    # Minimum accepted flight time: a seed on the plane must not re-trigger.
    return 10.0 * cfg.max_step


def first_return(seed: State3, plane: SectionPlane, rhs, cfg: IntegratorConfig) -> ReturnMapResult:
    """First direction-matching crossing after launching from an on-plane seed."""
    out = iterate_map(seed, plane, rhs, cfg, 1)
    if not out.complete:
        raise NoReturn(
            f"no return within span {cfg.span}",
            completed=out.results,
            failure_index=0,
        )
    return out.results[0]


def iterate_map(seed: State3, plane: SectionPlane, rhs, cfg: IntegratorConfig,
                k: int) -> IterateOutcome:
    """Chain the first-return map ``k`` times from one seed.

    Stops early if some iterate never returns; partial results are kept
    with the index of the failed iteration.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    _seed_world(seed, plane, tol=1e-9)  # validates the on-plane precondition
    batch = iterate_map_batch(
        np.asarray([plane.project(seed.to_array())]), plane, rhs, cfg, k
    )
    results = []
    for i in range(int(batch.counts[0])):
        hat = batch.images_hat[i, 0]
        results.append(
            ReturnMapResult(
                seed=seed if i == 0 else results[-1].image,
                image=State3.from_array(hat),
                flight_time=float(batch.flights[i, 0]),
            )
        )
    failure = None if batch.counts[0] >= k else int(batch.counts[0])
    return IterateOutcome(results=results, failure_index=failure)


@dataclass
class BatchIterates:
    """Return-map orbits of many seeds, iterated in lockstep."""

    images_hat: np.ndarray  # (k, n, 3) rotated-frame images, NaN where missing
    flights: np.ndarray     # (k, n) flight times
    counts: np.ndarray      # (n,) completed iterations per seed
    status: np.ndarray      # (n,) final integrator status

    def planar(self, plane: SectionPlane) -> np.ndarray:
        """In-plane (u, v) images, shape (k, n, 2)."""
        return plane.project(self.images_hat)


def iterate_map_batch(seeds_uv, plane: SectionPlane, rhs, cfg: IntegratorConfig,
                      k: int) -> BatchIterates:
    """Iterate the return map for many in-plane seeds at once.

    Seeds advance independently (their own adaptive steps and event clocks),
    so results match per-seed :func:`iterate_map` calls exactly.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    seeds_uv = np.atleast_2d(np.asarray(seeds_uv, dtype=float))
    hat0 = plane.embed(seeds_uv)
    world0 = plane.to_world_frame(hat0)

    k_cut = plane.cut_coord - 1
    cut_value = plane.cut_value

    # residual of world points in the rotated frame, vectorized
    def gfun(yw):
        hat = rotate_points(yw, -plane.rotation_angle, plane.rotation_axis)
        return hat[..., k_cut] - cut_value

    events_y, events_t, counts, status = _rk45.solve_events(
        rhs,
        world0,
        cfg.span,
        gfun,
        plane.direction_sign,
        _t_min(cfg),
        k,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.max_step,
    )
    images_hat = rotate_points(events_y, -plane.rotation_angle, plane.rotation_axis)
    return BatchIterates(
        images_hat=images_hat, flights=events_t, counts=counts, status=status
    )


@dataclass
class FixedPointResult:
    point: np.ndarray        # in-plane (u, v)
    jacobian: np.ndarray     # 2x2 return-map Jacobian
    eigenvalues: np.ndarray
    classification: str
    residual: float
    iterations: int


def _classify(eigvals: np.ndarray) -> str:
    mags = np.sort(np.abs(eigvals))
    if mags[1] > 1.0 > mags[0]:
        return "saddle"
    if mags[1] < 1.0:
        return "sink"
    if mags[0] > 1.0:
        return "source"
    return "nonhyperbolic"


def fixed_point_of_map(map2d, guess, tol: float = 1e-9, max_iter: int = 50,
                       fd_step: float = 1e-5) -> FixedPointResult:
    """Newton iteration on ``P(u) - u`` with central-difference Jacobian.

    ``fd_step`` scales with the local coordinate size.  Converges when the
    residual norm drops below ``tol``; classification comes from the
    eigenvalues of the 2x2 map Jacobian at the solution.
    """
    u = np.asarray(guess, dtype=float).copy()
    if u.shape != (2,):
        raise ValueError("guess must be a planar point (2,)")

    def jac(u0):
        J = np.empty((2, 2))
        for i in range(2):
            h = fd_step * max(1.0, abs(u0[i]))
            up, um = u0.copy(), u0.copy()
            up[i] += h
            um[i] -= h
            J[:, i] = (np.asarray(map2d(up)) - np.asarray(map2d(um))) / (2 * h)
        return J

    res = np.asarray(map2d(u)) - u
    for it in range(max_iter):
        if np.linalg.norm(res) < tol:
            J = jac(u)
            eig = np.linalg.eigvals(J)
            return FixedPointResult(
                point=u,
                jacobian=J,
                eigenvalues=eig,
                classification=_classify(eig),
                residual=float(np.linalg.norm(res)),
                iterations=it,
            )
        J = jac(u)
        A = J - np.eye(2)
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        # threshold sized for central-difference noise in the Jacobian entries
        if not np.isfinite(det) or abs(det) < 1e-8 * (1.0 + float(np.abs(A).max())) ** 2:
            raise SingularJacobian(f"J - I is singular at u={u.tolist()}")
        u = u - np.linalg.solve(A, res)
        res = np.asarray(map2d(u)) - u
    raise NoConvergence(
        f"residual {np.linalg.norm(res):.3e} after {max_iter} Newton steps"
    )


def find_fixed_point(guess, plane: SectionPlane, rhs, cfg: IntegratorConfig,
                     tol: float = 1e-9, max_iter: int = 50) -> FixedPointResult:
    """Locate a fixed point of the in-plane first-return map near ``guess``."""

    def P(uv):
        seed = State3.from_array(plane.embed(uv))
        result = first_return(seed, plane, rhs, cfg)
        return plane.project(result.image.to_array())

    return fixed_point_of_map(P, guess, tol=tol, max_iter=max_iter)


def close_return_guess(traj, plane: SectionPlane, refine: str = "dense_bisection"):
    """Initial guess for a fixed point: the closest consecutive same-direction
    crossing pair of a long orbit (a near-recurrence of the return map)."""
    crossings = find_crossings(traj, plane, refine=refine)
    best = None
    best_d = np.inf
    by_dir = {}
    for c in crossings:
        prev = by_dir.get(c.direction)
        if prev is not None:
            u0 = plane.project(prev.point.to_array())
            u1 = plane.project(c.point.to_array())
            d = float(np.hypot(*(u1 - u0)))
            if d < best_d:
                best_d = d
                best = u0
        by_dir[c.direction] = c
    if best is None:
        raise NoReturn("not enough crossings for a close-return guess")
    return np.asarray(best)


def export_crossings_csv(crossings, path) -> None:
    """Write crossings as CSV ``t,x_hat,y_hat,z_hat`` (rotated frame)."""
    with open(path, "w", newline="") as fh:
        fh.write("t,x_hat,y_hat,z_hat\n")
        for c in crossings:
            p = c.point
            fh.write(f"{c.t!r},{p.x!r},{p.y!r},{p.z!r}\n")
