import math

import numpy as np
import pytest

from gahkit import (
    EmptyTrajectory,
    IntegratorConfig,
    NoConvergence,
    NoReturn,
    RosslerParams,
    SectionPlane,
    SingularJacobian,
    State3,
    Trajectory,
    find_crossings,
    first_return,
    fixed_point_of_map,
    integrate,
    iterate_map,
    iterate_map_batch,
    make_rossler_rhs,
)
from gahkit.dynsys import rotate_points
from gahkit.section import close_return_guess

PI = math.pi


def circular_rhs(t, y):
    y = np.asarray(y)
    return np.stack([y[..., 1], -y[..., 0], np.zeros_like(y[..., 0])], axis=-1)


def fig_plane(direction="both"):
    return SectionPlane(
        rotation_angle=2 * PI / 5,
        rotation_axis="z",
        cut_coord=3,
        cut_value=5.0,
        direction=direction,
    )


class TestSectionPlane:
    def test_validation(self):
        with pytest.raises(ValueError):
            SectionPlane(rotation_axis="w")
        with pytest.raises(ValueError):
            SectionPlane(cut_coord=0)
        with pytest.raises(ValueError):
            SectionPlane(direction="up")

    def test_dict_roundtrip(self):
        p = fig_plane("ascending")
        assert SectionPlane.from_dict(p.to_dict()) == p

    def test_embed_project_inverse(self):
        p = fig_plane()
        uv = np.array([[1.0, -2.0], [3.5, 0.25]])
        hat = p.embed(uv)
        assert np.all(hat[:, 2] == 5.0)
        assert np.array_equal(p.project(hat), uv)

    def test_residual_is_cut_coordinate(self):
        p = fig_plane()
        hat = p.embed([1.0, 2.0])
        world = p.to_world_frame(hat)
        assert abs(p.residual(world)) < 1e-12


class TestFindCrossings:
    def test_linear_midpoint_example(self):
        traj = Trajectory(
            np.array([0.0, 1.0]), np.array([[0.0, 0.0, 4.0], [0.0, 0.0, 6.0]])
        )
        plane = SectionPlane(cut_coord=3, cut_value=5.0)
        (c,) = find_crossings(traj, plane, refine="linear")
        assert c.t == 0.5
        assert c.direction == "ascending"
        assert c.point.z == 5.0
        assert c.bracket == (0, 1)

    def test_constant_trajectory_no_crossings(self):
        traj = Trajectory(
            np.linspace(0, 1, 5), np.tile([0.0, 0.0, 5.0], (5, 1))
        )
        plane = SectionPlane(cut_coord=3, cut_value=5.0)
        assert find_crossings(traj, plane, refine="linear") == []

    def test_tangency_ignored(self):
        # touches the cut without a sign change
        zs = np.array([4.0, 5.0, 4.5])
        traj = Trajectory(
            np.arange(3.0), np.column_stack([np.zeros(3), np.zeros(3), zs])
        )
        plane = SectionPlane(cut_coord=3, cut_value=5.0)
        assert find_crossings(traj, plane, refine="linear") == []

    def test_zero_sample_crossing_detected(self):
        zs = np.array([4.0, 5.0, 6.0])
        traj = Trajectory(
            np.arange(3.0), np.column_stack([np.zeros(3), np.zeros(3), zs])
        )
        plane = SectionPlane(cut_coord=3, cut_value=5.0)
        (c,) = find_crossings(traj, plane, refine="linear")
        assert c.t == 1.0 and c.bracket == (0, 2)

    def test_direction_filter(self):
        zs = np.array([4.0, 6.0, 4.0])
        traj = Trajectory(
            np.arange(3.0), np.column_stack([np.zeros(3), np.zeros(3), zs])
        )
        plane_up = SectionPlane(cut_coord=3, cut_value=5.0, direction="ascending")
        plane_dn = SectionPlane(cut_coord=3, cut_value=5.0, direction="descending")
        assert [c.direction for c in find_crossings(traj, plane_up, "linear")] == ["ascending"]
        assert [c.direction for c in find_crossings(traj, plane_dn, "linear")] == ["descending"]

    def test_empty_trajectory_raises(self):
        traj = Trajectory(np.array([0.0]), np.zeros((1, 3)))
        with pytest.raises(EmptyTrajectory):
            find_crossings(traj, SectionPlane(), refine="linear")

    def test_dense_needs_dense_data(self):
        traj = Trajectory(
            np.array([0.0, 1.0]), np.array([[0.0, 0.0, 4.0], [0.0, 0.0, 6.0]])
        )
        with pytest.raises(ValueError):
            find_crossings(traj, SectionPlane(cut_coord=3, cut_value=5.0))

    def test_rossler_horseshoe_scatter_extent(self):
        # The crossing scatter of the default run forms the arc that the
        # published trapping quadrilateral encloses.
        traj = integrate(make_rossler_rhs(), IntegratorConfig(t_span=(0.0, 1000.0)))
        crossings = find_crossings(traj, fig_plane())
        assert len(crossings) > 50
        uv = np.array([fig_plane().project(c.point.to_array()) for c in crossings])
        assert uv[:, 0].min() > -8.5 and uv[:, 0].max() < 12.0
        assert uv[:, 1].min() > -27.0 and uv[:, 1].max() < 3.5
        # upward and downward passes pair off, so each direction holds about
        # half the crossings (exactly half on this deterministic run)
        ascending = find_crossings(traj, fig_plane("ascending"))
        ratio = len(ascending) / len(crossings)
        assert 0.35 <= ratio <= 0.65

    def test_linear_interpolation_order(self):
        exact = math.acos(0.5)
        plane = SectionPlane(cut_coord=1, cut_value=0.5)
        errs = []
        for h in (0.1, 0.05, 0.025):
            # keep the root at a fixed fraction (0.3) of its bracket
            ts = exact + (np.arange(-8, 8) + 0.7) * h
            ys = np.column_stack([np.cos(ts), np.sin(ts), np.zeros_like(ts)])
            crossings = find_crossings(Trajectory(ts, ys), plane, refine="linear")
            c = min(crossings, key=lambda c: abs(c.t - exact))
            errs.append(abs(c.t - exact))
        orders = np.log2(np.array(errs[:-1]) / errs[1:])
        assert np.all(orders >= 1.9)

    def test_refinement_dominance_on_rossler(self):
        rng = np.random.default_rng(5)
        rhs = make_rossler_rhs()
        plane = fig_plane()
        for _ in range(10):
            x0 = State3(*rng.uniform(-5, 5, 3))
            traj = integrate(
                rhs, IntegratorConfig(t_span=(0.0, 60.0), initial_state=x0)
            )
            dense = find_crossings(traj, plane, refine="dense_bisection")
            lin = find_crossings(traj, plane, refine="linear")
            assert len(dense) == len(lin)
            for cd, cl in zip(dense, lin):
                rd = abs(cd.point.z - 5.0)
                rl = abs(cl.point.z - 5.0)
                assert rd <= rl + 1e-12
                assert rd < 1e-10


class TestFirstReturn:
    cfg = IntegratorConfig(t_span=(0.0, 20.0), max_step=0.05, rel_tol=1e-10, abs_tol=1e-12)

    def test_circular_half_turn(self):
        plane = SectionPlane(cut_coord=1, cut_value=0.0, direction="both")
        r = first_return(State3(0, 1, 0), plane, circular_rhs, self.cfg)
        assert abs(r.flight_time - PI) < 1e-8
        assert np.max(np.abs(r.image.to_array() - [0, -1, 0])) < 1e-8

    def test_circular_full_turn_ascending(self):
        plane = SectionPlane(cut_coord=1, cut_value=0.0, direction="ascending")
        r = first_return(State3(0, 1, 0), plane, circular_rhs, self.cfg)
        assert abs(r.flight_time - 2 * PI) < 1e-8
        assert np.max(np.abs(r.image.to_array() - [0, 1, 0])) < 1e-8

    def test_involution(self):
        plane = SectionPlane(cut_coord=1, cut_value=0.0, direction="both")
        out = iterate_map(State3(0, 1, 0), plane, circular_rhs, self.cfg, 2)
        assert out.complete
        assert np.max(np.abs(out.results[1].image.to_array() - [0, 1, 0])) < 1e-8

    def test_k1_equals_first_return(self):
        plane = SectionPlane(cut_coord=1, cut_value=0.0, direction="both")
        r = first_return(State3(0, 1, 0), plane, circular_rhs, self.cfg)
        out = iterate_map(State3(0, 1, 0), plane, circular_rhs, self.cfg, 1)
        assert out.results[0] == r

    def test_no_return_raises(self):
        plane = SectionPlane(cut_coord=1, cut_value=0.0, direction="both")
        # Planar circle never reaches z = 3.
        far = SectionPlane(cut_coord=3, cut_value=3.0)
        seed = State3(0, 1, 3.0)
        with pytest.raises(NoReturn):
            first_return(seed, far, circular_rhs, self.cfg)
        del plane

    def test_off_plane_seed_rejected(self):
        plane = SectionPlane(cut_coord=1, cut_value=0.0)
        with pytest.raises(ValueError):
            first_return(State3(0.1, 1, 0), plane, circular_rhs, self.cfg)

    def test_returns_are_on_plane(self):
        rhs = make_rossler_rhs()
        plane = fig_plane()
        cfg = IntegratorConfig(t_span=(0.0, 200.0))
        for uv in ([-3.55, -27.0], [11.91, -6.6], [0.0, -10.0]):
            seed = State3.from_array(plane.embed(uv))
            r = first_return(seed, plane, rhs, cfg)
            assert abs(r.image.z - 5.0) < 1e-9

    def test_min_flight_time_blocks_instant_retrigger(self):
        rhs = make_rossler_rhs()
        plane = fig_plane()
        cfg = IntegratorConfig(t_span=(0.0, 200.0), max_step=0.05)
        seed = State3.from_array(plane.embed([5.0, -5.0]))
        r = first_return(seed, plane, rhs, cfg)
        assert r.flight_time > 10 * cfg.max_step

    def test_rotation_equivariance(self):
        # Sectioning the flow with a rotated plane matches sectioning the
        # conjugated (pre-rotated) flow with the unrotated plane.
        q = 2 * PI / 5
        rhs = make_rossler_rhs()

        def conj_rhs(t, y):
            w = rotate_points(y, q, "z")
            return rotate_points(rhs(t, w), -q, "z")

        x0 = np.array([0.0, 1.0, 0.0])
        tight = dict(rel_tol=1e-12, abs_tol=1e-12, t_span=(0.0, 30.0))
        traj_w = integrate(rhs, IntegratorConfig(initial_state=State3(*x0), **tight))
        traj_h = integrate(
            conj_rhs,
            IntegratorConfig(initial_state=State3(*rotate_points(x0, -q, "z")), **tight),
        )
        rot = SectionPlane(rotation_angle=q, cut_coord=3, cut_value=5.0)
        ident = SectionPlane(rotation_angle=0.0, cut_coord=3, cut_value=5.0)
        c1 = find_crossings(traj_w, rot)
        c2 = find_crossings(traj_h, ident)
        assert len(c1) == len(c2) > 0
        for a, b in zip(c1, c2):
            assert np.max(np.abs(a.point.to_array() - b.point.to_array())) < 1e-9


class TestBatchEquivalence:
    def test_batch_matches_single_seed_runs_exactly(self):
        rhs = make_rossler_rhs(RosslerParams())
        plane = fig_plane()
        cfg = IntegratorConfig(t_span=(0.0, 200.0))
        seeds = np.array(
            [[-3.55, -27.0], [11.91, -6.6], [0.0, -10.0], [5.0, -5.0], [-2.0, 0.0]]
        )
        batch = iterate_map_batch(seeds, plane, rhs, cfg, 3)
        for j, uv in enumerate(seeds):
            out = iterate_map(State3.from_array(plane.embed(uv)), plane, rhs, cfg, 3)
            assert out.complete
            for i, r in enumerate(out.results):
                assert np.array_equal(r.image.to_array(), batch.images_hat[i, j])
                assert r.flight_time == batch.flights[i, j]


class TestFixedPoint:
    def test_linear_saddle(self):
        P = lambda u: np.array([2.0 * u[0], 0.3 * u[1]])  # noqa: E731
        res = fixed_point_of_map(P, [0.1, 0.1], tol=1e-10)
        assert np.max(np.abs(res.point)) < 1e-10
        assert res.classification == "saddle"
        assert sorted(np.abs(res.eigenvalues)) == pytest.approx([0.3, 2.0], rel=1e-6)
        assert res.iterations <= 3
        assert res.residual < 1e-10

    def test_linear_sink(self):
        P = lambda u: np.array([0.5 * u[0], 0.5 * u[1]])  # noqa: E731
        res = fixed_point_of_map(P, [0.3, -0.4])
        assert np.max(np.abs(res.point)) < 1e-9
        assert res.classification == "sink"

    def test_singular_jacobian(self):
        # translation along x: J - I is singular away from any fixed point
        P = lambda u: np.array([u[0] + 1.0, 0.5 * u[1]])  # noqa: E731
        with pytest.raises(SingularJacobian):
            fixed_point_of_map(P, [1.0, 1.0])

    def test_no_convergence(self):
        P = lambda u: np.array([u[0] ** 3, 0.5 * u[1]])  # noqa: E731
        with pytest.raises(NoConvergence):
            fixed_point_of_map(P, [0.9, 0.1], max_iter=1)

    def test_close_return_guess_smoke(self):
        rhs = make_rossler_rhs()
        traj = integrate(rhs, IntegratorConfig(t_span=(0.0, 400.0)))
        guess = close_return_guess(traj, fig_plane("ascending"))
        assert guess.shape == (2,)
        assert -8.5 < guess[0] < 12.0
