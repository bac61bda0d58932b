"""A hand-built 3D flow whose full-rotation return map is a horseshoe.

The field is assembled from two half-rotations in cylindrical coordinates
``(r, theta, z)`` with ``theta' = 1`` throughout:

* ``theta in [0, pi]``: the radial coordinate stretches by a total factor
  of 1.2 while z squeezes by 0.2 toward the line z = -0.2 (both modulated
  by ``sigma(theta) = 2 sin^2 theta`` so the field is continuous at the
  seams).
* ``theta in [pi, 2pi]``: a folding rotation in the (r, z) planes about the
  circle r = 0.66, z = 0, blended smoothly to zero away from the fold by
  the radial ramp ``xi``.

Both half-phases integrate in closed form, which the numerical solver is
checked against.  One full rotation maps the transversal square strictly
into its own interior.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rk45
from .dynsys import IntegratorConfig
from .errors import AmbiguousBranch

__all__ = [
    "CylState",
    "CylDerivative",
    "FoldCoords",
    "TransversalSquare",
    "sigma",
    "xi",
    "stretch_squeeze_field",
    "stretch_squeeze_closed_form",
    "fold_field",
    "fold_closed_form",
    "fold_phase",
    "gah_field",
    "make_gah_rhs",
    "gah_poincare_image",
    "GahImageResult",
    "default_gah_config",
]

FOLD_CENTER_R = 0.66
STRETCH_RATE = math.log(1.2) / math.pi
SQUEEZE_RATE = math.log(0.2) / math.pi
Z_SQUEEZE_AXIS = -0.2

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CylState:
    """Cylindrical point (r >= 0, lifted angle theta, height z)."""

    r: float
    theta: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.theta) and math.isfinite(self.z)):
            raise ValueError("CylState components must be finite")
        if self.r < 0:
            raise ValueError(f"radius must be non-negative, got {self.r}")

    def to_array(self) -> np.ndarray:
        return np.array([self.r, self.theta, self.z], dtype=float)

    @classmethod
    def from_array(cls, a) -> "CylState":
        a = np.asarray(a, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class CylDerivative:
    """Time derivative in cylindrical components (no sign constraints)."""

    r: float
    theta: float
    z: float

    @classmethod
    def from_array(cls, a) -> "CylDerivative":
        a = np.asarray(a, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class FoldCoords:
    """Polar coordinates (rho, phi) about the fold circle r=0.66, z=0."""

    r_tilde: float
    rho: float
    phi: float
    center_c: float = FOLD_CENTER_R

    @classmethod
    def from_cyl(cls, s: CylState) -> "FoldCoords":
        r_tilde = s.r - FOLD_CENTER_R
        rho = math.hypot(r_tilde, s.z)
        phi = math.atan2(s.z, r_tilde)
        return cls(r_tilde=r_tilde, rho=rho, phi=phi)

    @property
    def z(self) -> float:
        return self.rho * math.sin(self.phi)


@dataclass(frozen=True)
class TransversalSquare:
    """The section square at theta = 0 that traps the return map."""

    r_min: float = 0.05
    r_max: float = 1.05
    z_min: float = -0.5
    z_max: float = 0.5
    theta: float = 0.0

    def contains(self, r, z, margin: float = 0.0):
        r = np.asarray(r)
        z = np.asarray(z)
        return (
            (r >= self.r_min + margin)
            & (r <= self.r_max - margin)
            & (z >= self.z_min + margin)
            & (z <= self.z_max - margin)
        )

    def interior_margin(self, r, z):
        """Distance to the nearest square edge; positive inside."""
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        return np.minimum(
            np.minimum(r - self.r_min, self.r_max - r),
            np.minimum(z - self.z_min, self.z_max - z),
        )

    def corners(self) -> np.ndarray:
        return np.array(
            [
                [self.r_min, self.z_min],
                [self.r_max, self.z_min],
                [self.r_max, self.z_max],
                [self.r_min, self.z_max],
            ]
        )

    def grid(self, n: int) -> np.ndarray:
        """An (n*n, 2) grid of (r, z) seeds covering the square."""
        rs = np.linspace(self.r_min, self.r_max, n)
        zs = np.linspace(self.z_min, self.z_max, n)
        rr, zz = np.meshgrid(rs, zs, indexing="ij")
        return np.column_stack([rr.ravel(), zz.ravel()])


def sigma(theta):
    """Angular modulation 2 sin^2(theta) = 1 - cos(2 theta); range [0, 2]."""
    theta = np.asarray(theta, dtype=float)
    out = 2.0 * np.sin(theta) ** 2
    return float(out) if out.ndim == 0 else out


def xi(r):
    """Radial blend: 0 below r=0.06, rising to 1 at the fold radius 0.66.

    The same ramp expressed in fold-offset coordinates is
    ``xi(r_tilde + 0.66)`` for ``r_tilde = r - 0.66``; only the radial form
    is provided.
    """
    r = np.asarray(r, dtype=float)
    ramp = np.sin(np.pi * (r - 0.06) / 1.2) ** 2
    out = np.where(r <= 0.06, 0.0, ramp)
    return float(out) if out.ndim == 0 else out


def stretch_squeeze_field(s: CylState) -> CylDerivative:
    """Derivative of the stretching/squeezing half-phase (theta in [0, pi])."""
    sg = sigma(s.theta)
    return CylDerivative.from_array(
        [
            STRETCH_RATE * sg * s.r,
            1.0,
            SQUEEZE_RATE * sg * (s.z - Z_SQUEEZE_AXIS),
        ]
    )


def _phase_integral(theta):
    """Integral of sigma from 0 to theta: theta - sin(theta)cos(theta)."""
    theta = np.asarray(theta, dtype=float)
    return theta - np.sin(theta) * np.cos(theta)


def stretch_squeeze_closed_form(s0: CylState, theta: float) -> CylState:
    """Exact solution of the stretch/squeeze phase from theta=0.

    At theta = pi the radius has grown by exactly 1.2 and the offset from
    z = -0.2 has shrunk by exactly 0.2.
    """
    if not 0.0 <= theta <= math.pi + 1e-12:
        raise ValueError("closed form is valid for theta in [0, pi]")
    q = float(_phase_integral(theta))
    r = s0.r * math.exp(STRETCH_RATE * q)
    z = Z_SQUEEZE_AXIS + (s0.z - Z_SQUEEZE_AXIS) * math.exp(SQUEEZE_RATE * q)
    return CylState(r, s0.theta + theta, z)


def fold_field(s: CylState) -> CylDerivative:
    """Derivative of the folding half-phase (theta in [pi, 2pi], full fold)."""
    sg = sigma(s.theta)
    return CylDerivative.from_array([-sg * s.z, 1.0, sg * (s.r - FOLD_CENTER_R)])


def fold_phase(t):
    """Rotation angle accumulated by the fold from time pi to t."""
    t = np.asarray(t, dtype=float)
    out = (t - math.pi) - np.sin(t) * np.cos(t)
    return float(out) if out.ndim == 0 else out


def fold_closed_form(rho0: float, phi0: float, t: float) -> FoldCoords:
    """Exact fold solution: rigid rotation by ``fold_phase(t)`` at radius rho0.

    ``fold_phase(pi) = 0`` and ``fold_phase(2pi) = pi``: the fold is exactly a
    half turn about the circle r = 0.66, z = 0.
    """
    if not math.pi - 1e-12 <= t <= _TWO_PI + 1e-12:
        raise ValueError("fold closed form is valid for t in [pi, 2pi]")
    phi = fold_phase(t) + phi0
    return FoldCoords(r_tilde=rho0 * math.cos(phi), rho=rho0, phi=phi)


def make_gah_rhs():
    """Array-native right-hand side of the assembled piecewise field."""

    def rhs(t, y):
        y = np.asarray(y, dtype=float)
        r = y[..., 0]
        th = y[..., 1]
        z = y[..., 2]
        thm = np.mod(th, _TWO_PI)
        sg = 2.0 * np.sin(th) ** 2
        r_tilde = r - FOLD_CENTER_R

        in_stretch = thm <= math.pi
        full_fold = (r >= FOLD_CENTER_R) | (z >= 0.0)
        blended = (r < FOLD_CENTER_R) & (z >= -0.26) & (z <= -0.06)

        ramp = np.where(r <= 0.06, 0.0, np.sin(np.pi * (r - 0.06) / 1.2) ** 2)
        dr = np.where(
            in_stretch,
            STRETCH_RATE * sg * r,
            np.where(full_fold, -sg * z, np.where(blended, -ramp * sg * z, 0.0)),
        )
        dz = np.where(
            in_stretch,
            SQUEEZE_RATE * sg * (z - Z_SQUEEZE_AXIS),
            np.where(full_fold, sg * r_tilde, 0.0),
        )
        return np.stack([dr, np.ones_like(dr), dz], axis=-1)

    return rhs


_GAH_RHS = make_gah_rhs()


def gah_field(s: CylState) -> CylDerivative:
    """Branch-selected derivative of the assembled system; theta' = 1 always.

    The branch predicates cover the whole state space; the defensive
    consistency check below guards against an edited predicate set.
    """
    thm = math.fmod(s.theta, _TWO_PI)
    if thm < 0:
        thm += _TWO_PI
    tol = 1e-12
    near_seam = min(thm, abs(thm - math.pi), abs(thm - _TWO_PI)) <= tol
    in_stretch = thm <= math.pi
    full_fold = (s.r >= FOLD_CENTER_R) or (s.z >= 0.0)
    blended = (s.r < FOLD_CENTER_R) and (-0.26 <= s.z <= -0.06)
    zero = (s.r < FOLD_CENTER_R) and (s.z < 0.0) and not blended
    if not (in_stretch or full_fold or blended or zero or near_seam):
        raise AmbiguousBranch(f"no branch matched state {s}")
    return CylDerivative.from_array(_GAH_RHS(0.0, s.to_array()))


def default_gah_config() -> IntegratorConfig:
    """Integration settings for one full rotation, with seam-aligned steps."""
    return IntegratorConfig(
        rel_tol=1e-9,
        abs_tol=1e-12,
        max_step=0.05,
        t_span=(0.0, _TWO_PI),
        t_breaks=(math.pi,),
    )


@dataclass
class GahImageResult:
    """Full-rotation images of section seeds, with per-seed failures."""

    seeds: np.ndarray    # (n, 2) of (r, z)
    images: np.ndarray   # (n, 2), NaN rows where integration failed
    failed: list = field(default_factory=list)

    def margins(self, square: TransversalSquare = TransversalSquare()) -> np.ndarray:
        return square.interior_margin(self.images[:, 0], self.images[:, 1])


def gah_poincare_image(seeds, cfg: IntegratorConfig | None = None) -> GahImageResult:
    """Map (r, z) seeds of the transversal square through one full rotation.

    Seeds must lie inside the square.  Per-seed integration failures are
    recorded, not fatal.
    """
    cfg = cfg or default_gah_config()
    seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
    if seeds.shape[1] != 2:
        raise ValueError("seeds must be (n, 2) pairs of (r, z)")
    square = TransversalSquare()
    inside = square.contains(seeds[:, 0], seeds[:, 1])
    if not np.all(inside):
        bad = np.flatnonzero(~inside)
        raise ValueError(f"seeds outside the transversal square at indices {bad.tolist()}")

    y0 = np.column_stack([seeds[:, 0], np.zeros(len(seeds)), seeds[:, 1]])
    t0, t1 = cfg.t_span
    breaks = cfg.t_breaks or (math.pi,)
    yf, ok = _rk45.solve_to(
        _GAH_RHS, y0, t0, t1, cfg.rel_tol, cfg.abs_tol, cfg.max_step, breaks=breaks
    )
    images = np.column_stack([yf[:, 0], yf[:, 2]])
    failed = [(int(i), "integration failed") for i in np.flatnonzero(~ok)]
    return GahImageResult(seeds=seeds, images=images, failed=failed)


def export_rz_csv(points: np.ndarray, path) -> None:
    """Write (r, z) pairs as CSV with header ``r,z``."""
    with open(path, "w", newline="") as fh:
        fh.write("r,z\n")
        for r, z in np.asarray(points):
            fh.write(f"{float(r)!r},{float(z)!r}\n")
