"""A concrete planar horseshoe diffeomorphism with a trapping rectangle.

The map composes four stages on the unit-square rectangle Q:

1. contract vertically by ``lambda_v`` and expand horizontally by
   ``lambda_h`` (anchored at the origin), turning Q into a thin ribbon;
2. wrap the ribbon beyond a fold line up and back over itself (the
   horseshoe arch), squeezing fibers through the bend so the folded part
   stays clear of the straight leg;
3. tuck the ribbon's leading tip down and back with a small cap bend, so
   the image's open ends stay strictly inside Q (a single fold alone would
   push the tip of the straight leg out of the rectangle whenever the
   leg's fixed point sits in the interior);
4. translate the bent ribbon into place.

On the straight leg the map is exactly affine, with fixed point
``(t_x/(1-lambda_h), t_y/(1-lambda_v))`` and Jacobian
``diag(lambda_h, lambda_v)`` (a saddle).  Default geometry is frozen from
a brute-force search for strict containment plus the keystone property.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoFixedPoint, OutOfDomain

__all__ = [
    "GahModelParams",
    "RectRegion",
    "gah_apply",
    "straight_leg_fixed_point",
    "check_star",
    "StarCheck",
    "iterate_region",
    "export_region_clouds_csv",
]


@dataclass(frozen=True)
class RectRegion:
    """Trapping rectangle Q with the marked x-intervals S and K.

    ``s_interval`` is the right subrectangle whose left edge passes through
    the straight-leg saddle; ``k_interval`` (the keystone) marks the seeds
    that travel deepest around the fold.
    """

    x_min: float = 0.0
    x_max: float = 1.0
    y_min: float = 0.0
    y_max: float = 1.0
    s_interval: tuple[float, float] = (0.6, 1.0)
    k_interval: tuple[float, float] = (0.98, 1.0)

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("rectangle intervals must be increasing")
        sx0, sx1 = self.s_interval
        kx0, kx1 = self.k_interval
        if not (self.x_min <= sx0 < sx1 <= self.x_max):
            raise ValueError("S must be an x-subinterval of Q")
        if not (sx0 <= kx0 < kx1 <= sx1):
            raise ValueError("K must be an x-subinterval of S")

    def contains(self, p, tol: float = 0.0) -> bool:
        x, y = float(p[0]), float(p[1])
        return (
            self.x_min - tol <= x <= self.x_max + tol
            and self.y_min - tol <= y <= self.y_max + tol
        )

    def interior_margin(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.minimum(
            np.minimum(pts[:, 0] - self.x_min, self.x_max - pts[:, 0]),
            np.minimum(pts[:, 1] - self.y_min, self.y_max - pts[:, 1]),
        )

    def grid(self, nx: int, ny: int | None = None) -> np.ndarray:
        ny = nx if ny is None else ny
        xs = np.linspace(self.x_min, self.x_max, nx)
        ys = np.linspace(self.y_min, self.y_max, ny)
        xx, yy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)


@dataclass(frozen=True)
class GahModelParams:
    """Geometry of the planar horseshoe map.

    ``fold_center`` is the center of the outermost fold circle in ribbon
    coordinates (after stretching, before translation); its x-component is
    the fold line.  ``fold_squeeze`` in (1/2, 1] thins fibers through the
    bend (values at or below 1/2 would crease the fold).  ``cap_line`` and
    ``cap_center_y`` place the tip-tuck bend; ``cap_line <= 0`` disables it.
    """

    lambda_v: float = 0.3
    lambda_h: float = 1.5
    fold_center: tuple[float, float] = (0.905, 0.175)
    translate: tuple[float, float] = (-0.3, 0.4)
    orientation: str = "preserving"
    fold_squeeze: float = 0.52
    cap_line: float = 0.65
    cap_center_y: float = -0.03

    def __post_init__(self):
        if not 0.0 < self.lambda_v < 0.5:
            raise ValueError(f"lambda_v must be in (0, 1/2), got {self.lambda_v}")
        if not 1.0 < self.lambda_h < 2.0:
            raise ValueError(f"lambda_h must be in (1, 2), got {self.lambda_h}")
        if self.orientation not in ("preserving", "reversing"):
            raise ValueError("orientation must be 'preserving' or 'reversing'")
        if not 0.5 < self.fold_squeeze <= 1.0:
            raise ValueError("fold_squeeze must lie in (1/2, 1]")
        if self.fold_center[1] - self.fold_squeeze * self.lambda_v <= 0:
            raise ValueError("fold radius must stay positive across the ribbon")

    def shifted(self, dx: float, dy: float = 0.0) -> "GahModelParams":
        tx, ty = self.translate
        return GahModelParams(
            lambda_v=self.lambda_v,
            lambda_h=self.lambda_h,
            fold_center=self.fold_center,
            translate=(tx + dx, ty + dy),
            orientation=self.orientation,
            fold_squeeze=self.fold_squeeze,
            cap_line=self.cap_line,
            cap_center_y=self.cap_center_y,
        )


def _ribbon_shape(u, v, params: GahModelParams):
    """Bend the stretched ribbon point (u, v): fold beyond the fold line,
    cap before the cap line, straight in between."""
    xf, fcy = params.fold_center
    c = params.fold_squeeze
    if u >= xf:
        rho = fcy - c * v
        cy = fcy + (1.0 - c) * v
        s = u - xf
        arc = math.pi * rho
        if s <= arc:
            al = s / rho
            return xf + rho * math.sin(al), cy - rho * math.cos(al)
        return xf - (s - arc), cy + rho
    if u <= params.cap_line:
        rho = v - params.cap_center_y
        s = params.cap_line - u
        arc = math.pi * rho
        if s <= arc:
            be = s / rho
            return params.cap_line - rho * math.sin(be), params.cap_center_y + rho * math.cos(be)
        return params.cap_line + (s - arc), 2.0 * params.cap_center_y - v
    return u, v


def gah_apply(p, params: GahModelParams = GahModelParams(),
              region: RectRegion = RectRegion()):
    """Apply the horseshoe map to a point of Q.

    Raises :class:`OutOfDomain` for points outside the rectangle.  The
    ``reversing`` orientation is the same bent ribbon reflected in the
    rectangle's horizontal midline.
    """
    x, y = float(p[0]), float(p[1])
    if not region.contains((x, y), tol=1e-12):
        raise OutOfDomain(f"point {(x, y)} outside the trapping rectangle")
    u = params.lambda_h * x
    v = params.lambda_v * y
    px, py = _ribbon_shape(u, v, params)
    out = (px + params.translate[0], py + params.translate[1])
    if params.orientation == "reversing":
        mid = 0.5 * (region.y_min + region.y_max)
        out = (out[0], 2.0 * mid - out[1])
    return np.array(out)


def _apply_grid(pts, params: GahModelParams, region: RectRegion) -> np.ndarray:
    return np.array([gah_apply(p, params, region) for p in pts])


def straight_leg_fixed_point(params: GahModelParams) -> np.ndarray:
    """Fixed point of the affine (unfolded) branch; a saddle since
    ``lambda_h > 1 > lambda_v``."""
    return np.array(
        [
            params.translate[0] / (1.0 - params.lambda_h),
            params.translate[1] / (1.0 - params.lambda_v),
        ]
    )


@dataclass(frozen=True)
class StarCheck:
    holds: bool
    fixed_point: np.ndarray
    witness: np.ndarray      # image point with the largest x
    max_image_x: float


def check_star(params: GahModelParams = GahModelParams(),
               region: RectRegion = RectRegion(),
               grid: int = 50) -> StarCheck:
    """Keystone property: the keystone strip's image lands left of the saddle.

    Brute-forces a grid of the keystone strip K and compares the largest
    image x-coordinate against the straight-leg fixed point.
    """
    p = straight_leg_fixed_point(params)
    if not region.contains(p):
        raise NoFixedPoint(
            f"straight-leg fixed point {p.tolist()} lies outside the rectangle"
        )
    kx0, kx1 = region.k_interval
    xs = np.linspace(kx0, kx1, grid)
    ys = np.linspace(region.y_min, region.y_max, grid)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    images = _apply_grid(np.column_stack([xx.ravel(), yy.ravel()]), params, region)
    imax = int(np.argmax(images[:, 0]))
    max_x = float(images[imax, 0])
    return StarCheck(
        holds=bool(max_x < p[0]),
        fixed_point=p,
        witness=images[imax],
        max_image_x=max_x,
    )


def iterate_region(params: GahModelParams = GahModelParams(),
                   region: RectRegion = RectRegion(),
                   n: int = 5, grid: int = 100) -> list:
    """Push a grid sampling of Q forward n times; returns one cloud per
    iterate.  Clouds are nested (up to grid resolution) once the image of
    Q lies inside Q."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = region.grid(grid)
    clouds = []
    for _ in range(n):
        pts = _apply_grid(pts, params, region)
        clouds.append(pts)
    return clouds


def export_region_clouds_csv(clouds, path) -> None:
    """Write iterate clouds as CSV ``iter,x,y``."""
    with open(path, "w", newline="") as fh:
        fh.write("iter,x,y\n")
        for i, cloud in enumerate(clouds, start=1):
            for x, y in np.asarray(cloud):
                fh.write(f"{i},{float(x)!r},{float(y)!r}\n")
