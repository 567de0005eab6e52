import math

import numpy as np
import pytest

from peakon.core import e_matrix, metric_matrix
from peakon.errors import DegeneratePlane, ExponentOverflow, NotPositiveDefinite, StepTooLarge, WrongArity
from peakon.geometry import (
    RiemannComponents3D,
    bivector,
    christoffel_2d_analytic,
    christoffel_fd,
    curvature_eigenvalues,
    curvature_q_matrix,
    curvature_report,
    gauss_curvature_2d,
    gauss_curvature_fd,
    rayleigh_max,
    riemann_3d,
    riemann_fd,
    riemann_tensor_fd,
    sectional_curvature_3d,
    sectional_curvature_direct,
)

from conftest import random_q


def kappa_of_gap(z):
    return gauss_curvature_2d([z, 0.0])


class TestGauss:
    def test_zero_at_ln2(self):
        assert abs(kappa_of_gap(math.log(2))) < 1e-12

    def test_limit_near_collision(self):
        assert kappa_of_gap(1e-8) == pytest.approx(-0.25, abs=1e-6)

    def test_ln4(self):
        assert kappa_of_gap(math.log(4)) == pytest.approx(0.08, rel=1e-14)

    def test_trichotomy(self):
        for z in np.linspace(0.01, math.log(2) - 1e-3, 50):
            assert kappa_of_gap(z) < 0
        for z in np.linspace(math.log(2) + 1e-3, 15, 50):
            assert kappa_of_gap(z) > 0

    def test_printed_form(self, rng):
        for z in rng.uniform(0.01, 20, size=50):
            printed = (math.exp(z) - 2) / (math.exp(2 * z) + 2 * math.exp(z) + 1)
            assert kappa_of_gap(z) == pytest.approx(printed, rel=1e-12, abs=1e-300)

    def test_decay(self):
        assert abs(kappa_of_gap(20.0)) < 1e-6

    def test_translation_invariant(self):
        assert gauss_curvature_2d([5.3, 4.3]) == pytest.approx(kappa_of_gap(1.0), rel=1e-14)

    def test_fd_oracle(self, rng):
        for _ in range(5):
            q = random_q(rng, 2, 0.5, 5.0)
            assert gauss_curvature_fd(q) == pytest.approx(gauss_curvature_2d(q), rel=1e-8)

    def test_arity(self):
        with pytest.raises(WrongArity):
            gauss_curvature_2d([1.0, 0.0, -1.0])


class TestChristoffel:
    def test_one_peak_is_flat(self):
        assert np.all(christoffel_fd([0.3]) == 0.0)

    def test_matches_analytic_2d(self, rng):
        for _ in range(20):
            q = random_q(rng, 2, 0.1, 4.0)
            assert np.max(np.abs(christoffel_fd(q) - christoffel_2d_analytic(q))) < 1e-6

    def test_lower_symmetry(self, rng):
        G = christoffel_fd(random_q(rng, 3))
        assert np.max(np.abs(G - G.transpose(0, 2, 1))) < 1e-10

    def test_step_too_large(self):
        with pytest.raises(StepTooLarge):
            christoffel_fd([5e-5, 0.0])


class TestRiemann3D:
    def test_r1313_example(self):
        e = math.e
        delta1 = (1 - e) * (1 / e - 1) * (1 + e) ** 2 * (1 / e + 1) ** 2
        assert riemann_3d([1.0, 0.0, -1.0]).r1313 == pytest.approx(e / delta1, rel=1e-13)
        assert e / delta1 > 0

    def test_against_fd_oracle(self, rng):
        for _ in range(3):
            q = random_q(rng, 3, 0.5, 5.0)
            closed, fd = riemann_3d(q).tensor(), riemann_tensor_fd(q)
            mask = np.abs(fd) > 1e-10
            assert np.max(np.abs(closed[mask] - fd[mask]) / np.abs(fd[mask])) < 1e-5

    def test_fd_symmetries(self):
        R = riemann_fd([1.0, 0.0, -1.0])
        T = riemann_tensor_fd([1.0, 0.0, -1.0])
        assert abs(T[0, 0, 1, 2]) < 1e-8
        assert abs(T[0, 1, 0, 2] - T[0, 2, 0, 1]) < 1e-8
        assert R.r1212 == pytest.approx(riemann_3d([1.0, 0.0, -1.0]).r1212, rel=1e-8)

    def test_decay(self):
        R = riemann_3d([20.0, 0.0, -20.0])
        assert max(abs(x) for x in R.as_dict().values()) < 1e-6

    def test_r1213_negative(self, rng):
        for _ in range(100):
            assert riemann_3d(random_q(rng, 3, 0.01, 8.0)).r1213 < 0

    def test_tensor_symmetries(self, rng):
        T = riemann_3d(random_q(rng, 3)).tensor()
        assert np.allclose(T, -T.transpose(1, 0, 2, 3))
        assert np.allclose(T, -T.transpose(0, 1, 3, 2))
        assert np.allclose(T, T.transpose(2, 3, 0, 1))

    def test_component_lookup(self):
        R = RiemannComponents3D(1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
        assert R.component(1, 3, 1, 2) == 4.0
        assert R.component(2, 1, 1, 2) == -1.0
        assert RiemannComponents3D.from_tensor(R.tensor()) == R

    def test_translation_invariant(self):
        a = riemann_3d([1.0, 0.0, -1.0]).as_dict()
        b = riemann_3d([101.0, 100.0, 99.0]).as_dict()
        for k in a:
            assert b[k] == pytest.approx(a[k], rel=1e-12)

    def test_overflow_guard(self):
        with pytest.raises(ExponentOverflow):
            riemann_3d([400.0, 399.0, 398.0])


class TestSectional:
    def test_d1_plane_is_gauss_curvature(self, rng):
        for _ in range(20):
            q = random_q(rng, 3)
            a = np.array([math.exp(-q[0]), math.exp(-q[1]), 0.0])
            b = np.array([0.0, 0.0, 1.0])
            assert sectional_curvature_3d(q, a, b) == pytest.approx(gauss_curvature_2d(q[1:]), abs=1e-10)

    def test_d3_plane_is_gauss_curvature(self, rng):
        for _ in range(20):
            q = random_q(rng, 3)
            a = np.array([0.0, math.exp(q[1]), math.exp(q[2])])
            b = np.array([1.0, 0.0, 0.0])
            assert sectional_curvature_3d(q, a, b) == pytest.approx(gauss_curvature_2d(q[:2]), abs=1e-10)

    def test_plane_invariance(self, rng):
        for _ in range(50):
            q = random_q(rng, 3)
            a, b = rng.normal(size=3), rng.normal(size=3)
            k = sectional_curvature_3d(q, a, b)
            assert sectional_curvature_3d(q, a + b, b) == pytest.approx(k, abs=1e-10)
            assert sectional_curvature_3d(q, 3 * b, -a) == pytest.approx(k, abs=1e-10)

    def test_reduction_matches_tensor_contraction(self, rng):
        for _ in range(50):
            q = random_q(rng, 3)
            a, b = rng.normal(size=3), rng.normal(size=3)
            assert sectional_curvature_3d(q, a, b) == pytest.approx(sectional_curvature_direct(q, a, b), abs=1e-10)

    def test_rayleigh_form(self, rng):
        for _ in range(50):
            q = random_q(rng, 3)
            a, b = rng.normal(size=3), rng.normal(size=3)
            z = bivector(a, b)
            ratio = z @ curvature_q_matrix(q) @ z / (z @ e_matrix(q) @ z)
            assert sectional_curvature_3d(q, a, b) == pytest.approx(ratio, abs=1e-10)

    def test_bounds(self, rng):
        for _ in range(5):
            q = random_q(rng, 3, 0.05, 5.0)
            lam = curvature_eigenvalues(q).max()
            for _ in range(1000 // 5):
                k = sectional_curvature_3d(q, rng.normal(size=3), rng.normal(size=3))
                assert k < 0.25
                assert k <= lam + 1e-9

    def test_degenerate_plane(self):
        with pytest.raises(DegeneratePlane):
            sectional_curvature_3d([1.0, 0.0, -1.0], [1.0, 2.0, 3.0], [2.0, 4.0, 6.0])


class TestEigenvalues:
    def test_example(self):
        lam = curvature_eigenvalues([1.0, 0.0, -1.0])
        e1 = math.exp(-1)
        assert lam.lambda1 == pytest.approx((e1 - 2 * e1**2) / (1 + e1) ** 2, rel=1e-13)
        assert lam.lambda3 == pytest.approx(lam.lambda1, rel=1e-13)
        assert lam.lambda2 == pytest.approx(e1**2 / (1 + e1) ** 2, rel=1e-13)
        assert lam.as_tuple() == pytest.approx((0.051952, 0.072330, 0.051952), abs=1e-6)

    def test_lambda1_peak(self):
        # lambda1 depends on v = exp(q3 - q2) only and peaks at v = 1/5
        lam = curvature_eigenvalues([1.0, 0.0, -math.log(5)])
        assert lam.lambda1 == pytest.approx(1 / 12, rel=1e-14)
        for b in np.linspace(0.05, 10, 200):
            assert curvature_eigenvalues([1.0, 0.0, -b]).lambda1 <= 1 / 12 + 1e-12

    def test_are_eigenvalues(self, rng):
        for _ in range(50):
            q = random_q(rng, 3, 0.05, 6.0)
            M = metric_matrix(q) @ curvature_q_matrix(q)
            ref = np.sort(np.linalg.eigvals(M).real)
            assert np.allclose(np.sort(curvature_eigenvalues(q).as_tuple()), ref, atol=1e-10)

    def test_bounded_by_quarter(self, rng):
        for _ in range(200):
            assert curvature_eigenvalues(random_q(rng, 3, 1e-4, 12.0)).max() < 0.25

    def test_decay(self):
        assert curvature_eigenvalues([20.0, 0.0, -20.0]).max() < 1e-6

    def test_eigenvectors(self):
        # lambda1 / lambda3 belong to the D1 / D3 planes; lambda2 to span{d1, d3}
        q = np.array([0.7, 0.0, -1.9])
        lam = curvature_eigenvalues(q)
        d1 = sectional_curvature_3d(q, [math.exp(-q[0]), math.exp(-q[1]), 0.0], [0, 0, 1])
        d3 = sectional_curvature_3d(q, [0.0, math.exp(q[1]), math.exp(q[2])], [1, 0, 0])
        mid = sectional_curvature_3d(q, [1, 0, 0], [0, 0, 1])
        assert (d1, mid, d3) == pytest.approx(lam.as_tuple(), abs=1e-12)


class TestRayleigh:
    def test_identity(self, rng):
        L = rng.normal(size=(3, 3))
        B = L @ L.T + np.eye(3)
        assert rayleigh_max(B, B)[0] == pytest.approx(1.0, rel=1e-12)

    def test_diagonal(self):
        val, vec = rayleigh_max(np.diag([2.0, 1.0]), np.eye(2))
        assert val == pytest.approx(2.0)
        assert abs(vec[0]) == pytest.approx(1.0)

    def test_monte_carlo(self, rng):
        for _ in range(3):
            M = rng.normal(size=(3, 3))
            A = M + M.T
            L = rng.normal(size=(3, 3))
            B = L @ L.T + 0.1 * np.eye(3)
            lam, vec = rayleigh_max(A, B)
            Z = rng.normal(size=(100_000, 3))
            quot = np.einsum("mi,ij,mj->m", Z, A, Z) / np.einsum("mi,ij,mj->m", Z, B, Z)
            assert np.max(quot) <= lam + 1e-9
            assert vec @ A @ vec / (vec @ B @ vec) == pytest.approx(lam, rel=1e-10)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            rayleigh_max(np.eye(2), np.diag([1.0, -1.0]))


class TestReport:
    def test_two_peaks(self):
        rep = curvature_report([math.log(2), 0.0]).as_dict()
        assert abs(rep["kappa"]) < 1e-10 and "riemann" not in rep

    def test_three_peaks_with_plane(self):
        rep = curvature_report([1.0, 0.0, -1.0], plane=([1, 0, 0], [0, 1, 0])).as_dict()
        assert set(rep["riemann"]) == {"r1212", "r2323", "r1313", "r1213", "r1223", "r1323"}
        assert np.isfinite(rep["sectional"]) and rep["sectional"] < 0.25
        assert len(rep["eigenvalues"]) == 3
