import numpy as np
import pytest
from scipy.spatial import ConvexHull, cKDTree

from gahkit import (
    GahModelParams,
    NoFixedPoint,
    OutOfDomain,
    RectRegion,
    check_star,
    gah_apply,
    iterate_region,
    straight_leg_fixed_point,
)
from gahkit.trapping import convex_hull_contains

Q = RectRegion()
DEFAULTS = GahModelParams()


class TestParams:
    def test_lambda_ranges_enforced(self):
        with pytest.raises(ValueError):
            GahModelParams(lambda_v=0.6)
        with pytest.raises(ValueError):
            GahModelParams(lambda_v=0.0)
        with pytest.raises(ValueError):
            GahModelParams(lambda_h=2.5)
        with pytest.raises(ValueError):
            GahModelParams(lambda_h=1.0)

    def test_fold_radius_positivity_enforced(self):
        with pytest.raises(ValueError):
            GahModelParams(fold_center=(0.9, 0.1), fold_squeeze=0.9)

    def test_region_interval_nesting(self):
        with pytest.raises(ValueError):
            RectRegion(s_interval=(0.6, 1.0), k_interval=(0.2, 0.4))


class TestAffineBranch:
    # Fold line beyond the stretched width and cap disabled: the map is
    # affine everywhere, matching (x, y) -> (lh x + tx, lv y + ty).
    AFFINE = GahModelParams(
        fold_center=(1.6, 0.175),
        translate=(0.1, 0.2),
        cap_line=-1.0,
    )

    def test_map_is_affine_when_fold_inactive(self):
        assert self.AFFINE.lambda_h * (Q.x_max - Q.x_min) <= self.AFFINE.fold_center[0]
        for p in Q.grid(7):
            img = gah_apply(p, self.AFFINE, Q)
            expect = [1.5 * p[0] + 0.1, 0.3 * p[1] + 0.2]
            assert np.max(np.abs(img - expect)) < 1e-15

    def test_fixed_point_formula(self):
        p = straight_leg_fixed_point(DEFAULTS)
        tx, ty = DEFAULTS.translate
        assert np.allclose(p, [tx / (1 - 1.5), ty / (1 - 0.3)], rtol=1e-15)
        img = gah_apply(p, DEFAULTS, Q)
        assert np.max(np.abs(img - p)) < 1e-14

    def test_straight_leg_jacobian_is_diag(self):
        p = straight_leg_fixed_point(DEFAULTS)
        h = 1e-6
        J = np.empty((2, 2))
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            J[:, i] = (gah_apply(p + e, DEFAULTS, Q) - gah_apply(p - e, DEFAULTS, Q)) / (2 * h)
        assert np.allclose(J, np.diag([1.5, 0.3]), atol=1e-8)
        eig = np.linalg.eigvals(J)
        assert sorted(np.abs(eig)) == pytest.approx([0.3, 1.5], rel=1e-6)


class TestContainment:
    def test_image_strictly_inside_on_grid(self):
        pts = Q.grid(200)
        images = np.array([gah_apply(p, DEFAULTS, Q) for p in pts])
        margins = Q.interior_margin(images)
        assert margins.min() > 0.0

    def test_out_of_domain_raises(self):
        with pytest.raises(OutOfDomain):
            gah_apply((1.5, 0.5), DEFAULTS, Q)


class TestStarProperty:
    def test_default_holds(self):
        res = check_star()
        assert res.holds
        assert res.max_image_x < res.fixed_point[0]
        assert res.witness[0] == res.max_image_x

    def test_shifted_right_fails_with_witness(self):
        # A rightward shift keeps the saddle inside but pushes the keystone
        # image past it.
        res = check_star(DEFAULTS.shifted(0.2))
        assert not res.holds
        assert res.witness[0] > res.fixed_point[0]

    def test_half_width_shift_loses_fixed_point(self):
        with pytest.raises(NoFixedPoint):
            check_star(DEFAULTS.shifted(0.5))

    def test_flat_limit_keeps_verdict(self):
        res = check_star(GahModelParams(lambda_v=0.01))
        assert res.holds


class TestIteratedRegion:
    def test_first_cloud_is_grid_image(self):
        clouds = iterate_region(DEFAULTS, Q, n=1, grid=20)
        pts = Q.grid(20)
        expect = np.array([gah_apply(p, DEFAULTS, Q) for p in pts])
        assert np.array_equal(clouds[0], expect)

    def test_clouds_nested(self):
        clouds = iterate_region(DEFAULTS, Q, n=5, grid=60)
        for later, earlier in zip(clouds[1:], clouds[:-1]):
            assert convex_hull_contains(later, earlier, tol=1e-9)

    def test_hull_areas_regression(self):
        clouds = iterate_region(DEFAULTS, Q, n=6, grid=80)
        areas = [ConvexHull(c).volume for c in clouds]
        expected = [0.41112, 0.25543, 0.17196, 0.13199, 0.12164, 0.11819]
        assert np.allclose(areas, expected, atol=5e-4)
        for a0, a1 in zip(areas, areas[1:]):
            assert a1 <= a0 + 1e-12

    def test_injective_on_grid(self):
        pts = Q.grid(30)
        images = np.array([gah_apply(p, DEFAULTS, Q) for p in pts])
        d, _ = cKDTree(images).query(images, k=2)
        assert d[:, 1].min() > 1e-4


class TestOrientation:
    def test_reversing_is_reflected_preserving(self):
        rev = GahModelParams(orientation="reversing")
        mid = 0.5 * (Q.y_min + Q.y_max)
        for p in Q.grid(9):
            a = gah_apply(p, rev, Q)
            b = gah_apply(p, DEFAULTS, Q)
            assert np.max(np.abs(a - [b[0], 2 * mid - b[1]])) < 1e-15

    def test_reversing_still_contained(self):
        rev = GahModelParams(orientation="reversing")
        pts = Q.grid(50)
        images = np.array([gah_apply(p, rev, Q) for p in pts])
        assert Q.interior_margin(images).min() > 0.0


class TestSaddleClassification:
    def test_star_fixed_point_in_s_interval(self):
        p = straight_leg_fixed_point(DEFAULTS)
        assert Q.s_interval[0] == pytest.approx(p[0], abs=1e-12)
