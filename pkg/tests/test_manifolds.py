"""Geometry kernels: fixed-value checks and randomized invariants."""

import numpy as np
import pytest

from riemstat import (
    CutLocusError,
    DegenerateInputError,
    Euclidean,
    Grassmann,
    Hyperbolic,
    Product,
    SPD,
    SpecParseError,
    Sphere,
    make_manifold,
)

from conftest import point_discrepancy, tangent_within_cut

RNG_SEED = 20240811


def transported_cov_oracle(m, g, h, cov):
    """Independent covariance transport: move scaled eigenvectors one by one.

    cov = sum_i v_i v_i' with v_i = sqrt(lambda_i) w_i, so the transported
    matrix is sum_i T(v_i) T(v_i)' with T the chart-to-chart transport.
    """
    w, W = np.linalg.eigh(cov)
    out = np.zeros_like(cov)
    for lam, vec in zip(w, W.T):
        v = np.sqrt(max(lam, 0.0)) * vec
        moved = m.to_chart(h, m.transport(g, h, m.from_chart(g, v)))
        out += np.outer(moved, moved)
    return out


# ----------------------------------------------------------------------------
# fixed cases
# ----------------------------------------------------------------------------


class TestFixedCases:
    def test_sphere_exp_quarter_turn(self):
        m = Sphere(2)
        x = np.array([0.0, 0.0, 1.0])
        u = np.array([np.pi / 2, 0.0, 0.0])
        np.testing.assert_allclose(m.exp(x, u), [1.0, 0.0, 0.0], atol=1e-12)

    def test_sphere_log_dist_consistency_quarter_turn(self):
        m = Sphere(2)
        x = np.array([0.0, 0.0, 1.0])
        y = np.array([1.0, 0.0, 0.0])
        u = m.log(x, y)
        np.testing.assert_allclose(u, [np.pi / 2, 0.0, 0.0], atol=1e-12)
        assert m.dist(x, y) == pytest.approx(np.pi / 2, abs=1e-12)

    def test_hyperbolic_exp_from_origin(self):
        m = Hyperbolic(2)
        x = np.array([0.0, 0.0, 1.0])
        for a in (0.3, 1.2, 2.5):
            u = np.array([a, 0.0, 0.0])
            np.testing.assert_allclose(
                m.exp(x, u), [np.sinh(a), 0.0, np.cosh(a)], atol=1e-12
            )

    def test_spd_exp_log_at_identity(self):
        m = SPD(2)
        eye = np.eye(2).reshape(-1)
        u = np.diag([1.0, 0.0]).reshape(-1)
        np.testing.assert_allclose(
            m.exp(eye, u).reshape(2, 2), np.diag([np.e, 1.0]), atol=1e-12
        )
        y = np.diag([np.e**2, 1.0]).reshape(-1)
        np.testing.assert_allclose(
            m.log(eye, y).reshape(2, 2), np.diag([2.0, 0.0]), atol=1e-12
        )

    def test_spd_dist_identity_to_scaled(self):
        m = SPD(2)
        eye = np.eye(2).reshape(-1)
        y = (np.e * np.eye(2)).reshape(-1)
        assert m.dist(eye, y) == pytest.approx(np.sqrt(2.0), abs=1e-12)

    def test_grassmann_orthogonal_lines_distance(self):
        m = Grassmann(2, 1)
        e1 = np.array([1.0, 0.0])
        e2 = np.array([0.0, 1.0])
        assert m.dist(e1, e2) == pytest.approx(np.pi / 2, abs=1e-12)

    def test_euclidean_kernels_are_affine(self):
        m = Euclidean(3)
        x = np.array([1.0, 2.0, 3.0])
        y = np.array([0.0, -1.0, 5.0])
        np.testing.assert_allclose(m.log(x, y), y - x)
        np.testing.assert_allclose(m.exp(x, y - x), y)
        assert m.dist(x, y) == pytest.approx(np.linalg.norm(y - x))
        np.testing.assert_allclose(m.transport(x, y, x), x)

    def test_sphere_chart_at_pole_is_canonical(self):
        m = Sphere(2)
        basis = m.chart_basis(np.array([0.0, 0.0, 1.0]))
        np.testing.assert_allclose(basis, np.eye(3)[:2], atol=1e-15)

    def test_spd_chart_at_identity_is_mandel(self):
        m = SPD(2)
        basis = m.chart_basis(np.eye(2).reshape(-1))
        expected = np.array(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 1 / np.sqrt(2), 1 / np.sqrt(2), 0.0],
            ]
        )
        np.testing.assert_allclose(basis, expected, atol=1e-12)

    def test_euclidean_chart_is_canonical(self):
        m = Euclidean(3)
        np.testing.assert_allclose(m.chart_basis(np.zeros(3)), np.eye(3))

    def test_sphere_transport_map_quarter_turn_matches_oracle(self):
        m = Sphere(2)
        g = np.array([0.0, 0.0, 1.0])
        h = np.array([1.0, 0.0, 0.0])
        A = m.transport_map(g, h)
        rng = np.random.default_rng(RNG_SEED)
        B = rng.standard_normal((2, 2))
        cov = B @ B.T + 0.5 * np.eye(2)
        np.testing.assert_allclose(
            A @ cov @ A.T, transported_cov_oracle(m, g, h, cov), atol=1e-10
        )

    def test_transport_map_identity_when_stationary(self, manifold):
        rng = np.random.default_rng(RNG_SEED)
        x = manifold.random_point(rng)
        np.testing.assert_allclose(
            manifold.transport_map(x, x), np.eye(manifold.dim), atol=1e-9
        )


# ----------------------------------------------------------------------------
# error paths
# ----------------------------------------------------------------------------


class TestErrors:
    def test_sphere_antipodal_log_raises(self):
        m = Sphere(2)
        x = np.array([0.0, 0.0, 1.0])
        with pytest.raises(CutLocusError):
            m.log(x, -x)

    def test_sphere_near_antipodal_log_raises(self):
        m = Sphere(2)
        x = np.array([0.0, 0.0, 1.0])
        y = m.exp(x, np.array([np.pi - 1e-8, 0.0, 0.0]))
        with pytest.raises(CutLocusError):
            m.log(x, y)

    def test_grassmann_orthogonal_subspaces_log_raises(self):
        m = Grassmann(2, 1)
        with pytest.raises(CutLocusError):
            m.log(np.array([1.0, 0.0]), np.array([0.0, 1.0]))

    def test_sphere_project_zero_raises(self):
        with pytest.raises(DegenerateInputError):
            Sphere(2).project(np.zeros(3))

    def test_grassmann_project_rank_deficient_raises(self):
        m = Grassmann(4, 2)
        X = np.zeros((4, 2))
        X[:, 0] = [1.0, 0.0, 0.0, 0.0]
        X[:, 1] = [2.0, 0.0, 0.0, 0.0]
        with pytest.raises(DegenerateInputError):
            m.project(X.reshape(-1))

    def test_spec_parse_errors(self):
        for bad in ("tube:3", "sphere", "sphere:x", "product[sphere:2", "sphere:2]"):
            with pytest.raises(SpecParseError):
                make_manifold(bad)


# ----------------------------------------------------------------------------
# randomized invariants, fixed seeds
# ----------------------------------------------------------------------------


N_RANDOM = 60


class TestInvariants:
    def test_spec_string_round_trip(self, manifold):
        assert make_manifold(manifold.spec_string()) == manifold

    def test_exp_zero_tangent_returns_base(self, manifold):
        rng = np.random.default_rng(RNG_SEED)
        x = manifold.random_point(rng)
        np.testing.assert_allclose(
            manifold.exp(x, np.zeros(manifold.ambient_dim)), x, atol=1e-15
        )
        np.testing.assert_allclose(manifold.exp_coords(x, np.zeros(manifold.dim)), x,
                                   atol=1e-15)

    def test_log_identical_points_is_zero(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 1)
        x = manifold.random_point(rng)
        assert np.linalg.norm(manifold.log(x, x)) <= 1e-12

    def test_chart_round_trip(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 2)
        for _ in range(N_RANDOM):
            x = manifold.random_point(rng)
            coords = rng.standard_normal(manifold.dim)
            back = manifold.to_chart(x, manifold.from_chart(x, coords))
            np.testing.assert_allclose(back, coords, atol=1e-9)

    def test_chart_basis_orthonormal_and_deterministic(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 3)
        for _ in range(10):
            x = manifold.random_point(rng)
            basis = manifold.chart_basis(x)
            gram = np.array(
                [[manifold.inner(x, a, b) for b in basis] for a in basis]
            )
            np.testing.assert_allclose(gram, np.eye(manifold.dim), atol=1e-9)
            again = manifold.chart_basis(x.copy())
            assert np.array_equal(basis, again)

    def test_exp_log_round_trip_in_tangent(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 4)
        for _ in range(N_RANDOM):
            x = manifold.random_point(rng)
            coords = tangent_within_cut(manifold, rng, x)
            y = manifold.exp_coords(x, coords)
            np.testing.assert_allclose(manifold.log_coords(x, y), coords, atol=1e-8)

    def test_log_exp_round_trip_on_manifold(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 5)
        for _ in range(N_RANDOM):
            x = manifold.random_point(rng)
            y = manifold.random_point(rng)
            try:
                u = manifold.log(x, y)
            except CutLocusError:
                continue
            z = manifold.exp(x, u)
            # matrix subspaces may return a rotated representative
            assert point_discrepancy(manifold, z, y) <= 1e-8

    def test_dist_equals_log_norm(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 6)
        for _ in range(N_RANDOM):
            x = manifold.random_point(rng)
            y = manifold.random_point(rng)
            try:
                coords = manifold.log_coords(x, y)
            except CutLocusError:
                continue
            assert abs(manifold.dist(x, y) - np.linalg.norm(coords)) <= 1e-9

    def test_exp_outputs_satisfy_point_invariants(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 7)
        for _ in range(N_RANDOM):
            x = manifold.random_point(rng)
            coords = tangent_within_cut(manifold, rng, x)
            manifold.check_point(manifold.exp_coords(x, coords), atol=1e-9)

    def test_transport_of_forward_log_is_reversed_log(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 8)
        for _ in range(N_RANDOM):
            g = manifold.random_point(rng)
            h = manifold.random_point(rng)
            try:
                fwd = manifold.log(g, h)
                back = manifold.log_coords(h, g)
            except CutLocusError:
                continue
            moved = manifold.to_chart(h, manifold.transport(g, h, fwd))
            np.testing.assert_allclose(moved, -back, atol=1e-8)

    def test_transport_isometry(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 9)
        for _ in range(N_RANDOM):
            g = manifold.random_point(rng)
            h = manifold.random_point(rng)
            u = manifold.from_chart(g, rng.standard_normal(manifold.dim))
            v = manifold.from_chart(g, rng.standard_normal(manifold.dim))
            try:
                tu = manifold.transport(g, h, u)
                tv = manifold.transport(g, h, v)
            except CutLocusError:
                continue
            assert abs(
                manifold.inner(h, tu, tv) - manifold.inner(g, u, v)
            ) <= 1e-8 * max(1.0, abs(manifold.inner(g, u, v)))

    def test_transport_map_is_orthogonal_and_matches_transport(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 10)
        for _ in range(8):
            g = manifold.random_point(rng)
            h = manifold.random_point(rng)
            try:
                A = manifold.transport_map(g, h)
            except CutLocusError:
                continue
            np.testing.assert_allclose(A @ A.T, np.eye(manifold.dim), atol=1e-9)
            coords = rng.standard_normal(manifold.dim)
            direct = manifold.to_chart(
                h, manifold.transport(g, h, manifold.from_chart(g, coords))
            )
            np.testing.assert_allclose(A @ coords, direct, atol=1e-9)

    def test_transport_cov_matches_eigen_oracle(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 11)
        for _ in range(8):
            g = manifold.random_point(rng)
            h = manifold.random_point(rng)
            B = rng.standard_normal((manifold.dim, manifold.dim))
            cov = B @ B.T + 0.1 * np.eye(manifold.dim)
            try:
                moved = manifold.transport_cov(g, h, cov)
            except CutLocusError:
                continue
            np.testing.assert_allclose(
                moved, transported_cov_oracle(manifold, g, h, cov), atol=1e-10
            )

    def test_project_is_idempotent_and_fixes_points(self, manifold):
        rng = np.random.default_rng(RNG_SEED + 12)
        x = manifold.random_point(rng)
        np.testing.assert_allclose(manifold.project(x), x, atol=1e-9)
        noisy = x + 1e-8 * rng.standard_normal(manifold.ambient_dim)
        fixed = manifold.project(noisy)
        manifold.check_point(fixed, atol=1e-7)
        np.testing.assert_allclose(manifold.project(fixed), fixed, atol=1e-12)


class TestManifoldSpecific:
    def test_spd_affine_invariance(self):
        m = SPD(3)
        rng = np.random.default_rng(RNG_SEED + 13)
        for _ in range(20):
            X = m.random_point(rng)
            Y = m.random_point(rng)
            A = rng.standard_normal((3, 3))
            while abs(np.linalg.det(A)) < 0.1:
                A = rng.standard_normal((3, 3))
            gX = (A @ X.reshape(3, 3) @ A.T).reshape(-1)
            gY = (A @ Y.reshape(3, 3) @ A.T).reshape(-1)
            assert m.dist(gX, gY) == pytest.approx(m.dist(X, Y), abs=1e-8, rel=1e-8)

    def test_grassmann_representative_invariance(self):
        m = Grassmann(4, 2)
        rng = np.random.default_rng(RNG_SEED + 14)
        for _ in range(20):
            x = m.random_point(rng)
            y = m.random_point(rng)
            # random right rotation of the representative
            theta = rng.uniform(0, 2 * np.pi)
            R = np.array(
                [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
            )
            xr = (x.reshape(4, 2) @ R).reshape(-1)
            assert m.dist(xr, y) == pytest.approx(m.dist(x, y), abs=1e-8)
            norm = np.linalg.norm(m.log(x, y))
            norm_r = np.linalg.norm(m.log(xr, y))
            assert norm_r == pytest.approx(norm, abs=1e-8)
            coords = tangent_within_cut(m, rng, x)
            z = m.exp_coords(x, coords)
            zr = m.exp(xr, m.transport(x, xr, m.from_chart(x, coords)))
            # same subspace regardless of representative
            assert point_discrepancy(m, z, zr) <= 1e-8

    def test_product_distance_adds_in_squares(self):
        m = make_manifold("product[euclidean:2,sphere:2]")
        rng = np.random.default_rng(RNG_SEED + 15)
        for _ in range(20):
            x = m.random_point(rng)
            y = m.random_point(rng)
            parts = [
                part.dist(a, b) ** 2
                for part, a, b in zip(m.parts, m.split(x), m.split(y))
            ]
            assert m.dist(x, y) ** 2 == pytest.approx(sum(parts), abs=1e-12)

    def test_product_kernels_act_blockwise(self):
        m = make_manifold("product[euclidean:2,sphere:2]")
        rng = np.random.default_rng(RNG_SEED + 16)
        x = m.random_point(rng)
        y = m.random_point(rng)
        u = m.log(x, y)
        for part, xp, yp, up in zip(m.parts, m.split(x), m.split(y), m.split(u)):
            np.testing.assert_allclose(part.log(xp, yp), up, atol=1e-12)
        A = m.transport_map(x, y)
        off = A[: m.parts[0].dim, m.parts[0].dim:]
        np.testing.assert_allclose(off, 0.0, atol=1e-15)

    def test_nested_product_flattens(self):
        m = make_manifold("product[euclidean:1,product[sphere:2,euclidean:2]]")
        assert m.spec_string() == "product[euclidean:1,sphere:2,euclidean:2]"
        assert len(m.parts) == 3

    def test_hyperbolic_no_cut_locus_far_apart(self):
        m = Hyperbolic(2)
        rng = np.random.default_rng(RNG_SEED + 17)
        x = m.random_point(rng, scale=3.0)
        y = m.random_point(rng, scale=3.0)
        u = m.log(x, y)
        np.testing.assert_allclose(m.exp(x, u), y, atol=1e-8)

    def test_sphere_project_normalizes(self):
        m = Sphere(2)
        np.testing.assert_allclose(
            m.project(np.array([0.0, 3.0, 4.0])), [0.0, 0.6, 0.8], atol=1e-15
        )

    def test_spd_project_clips_eigenvalues(self):
        m = SPD(2)
        bad = np.array([[1.0, 0.0], [0.0, -0.5]]).reshape(-1)
        fixed = m.project(bad)
        m.check_point(fixed)
        w = np.linalg.eigvalsh(fixed.reshape(2, 2))
        assert w.min() > 0
