"""Whitening, the two multivariate statistics and their moment oracles."""

import math

import numpy as np
import pytest

from lbinorm.core import standardize
from lbinorm.errors import SingularCovariance
from lbinorm.multivariate import (
    moment_R,
    moment_S,
    sample_bartlett_lower,
    stat_gl,
    stat_lt,
    whiten,
    wishart_moment_check,
)


def _stat_lt_bruteforce(Z):
    """Literal quadruple-loop form of the triangular-group statistic."""
    n, p = Z.shape
    total = 0.0
    for i in range(n):
        q = Z[i] ** 2
        r2 = q.sum()
        total += (n + p + 2) * (n + p) * r2 * r2
        for j in range(1, p + 1):
            for k in range(1, p + 1):
                total -= 2.0 * (n + p + 2) * max(j, k) * q[j - 1] * q[k - 1]
                total -= 2.0 * (n + p) * min(j, k) * q[j - 1] * q[k - 1]
        u = sum(j * q[j - 1] for j in range(1, p + 1))
        total += 4.0 * u * u
    return total


class TestWhiten:
    def test_reduces_to_univariate_standardize(self):
        x = np.random.default_rng(1).normal(size=9)
        Z = whiten(x[:, None])
        np.testing.assert_allclose(Z[:, 0], standardize(x), rtol=1e-12)

    def test_identical_rows_raise(self):
        with pytest.raises(SingularCovariance):
            whiten(np.ones((8, 2)))

    def test_whitening_identities(self):
        X = np.random.default_rng(2).normal(size=(10, 2))
        Z = whiten(X)
        np.testing.assert_allclose(Z.sum(axis=0), 0.0, atol=1e-9)
        np.testing.assert_allclose(Z.T @ Z / 10.0, np.eye(2), atol=1e-10)

    def test_shape_requirements(self):
        with pytest.raises(ValueError):
            whiten(np.random.default_rng(3).normal(size=(3, 2)))


class TestStatGl:
    def test_p1_reduction_to_kurtosis_direction(self):
        x = np.random.default_rng(4).normal(size=12)
        z = standardize(x)
        assert stat_gl(whiten(x[:, None])) == pytest.approx(np.sum(z**4), rel=1e-12)

    def test_spherical_equality_case(self):
        # rows on a sphere of squared radius p give exactly n * p^2
        Z = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        assert stat_gl(Z) == pytest.approx(4.0 * 4.0)

    def test_mahalanobis_bruteforce(self):
        X = np.random.default_rng(5).normal(size=(12, 3))
        xbar = X.mean(axis=0)
        S = (X - xbar).T @ (X - xbar) / 12.0
        d = np.array([(x - xbar) @ np.linalg.solve(S, x - xbar) for x in X])
        assert stat_gl(whiten(X)) == pytest.approx(np.sum(d * d), rel=1e-10)

    def test_general_linear_invariance(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(15, 3))
        ref = stat_gl(whiten(X))
        for _ in range(20):
            B = rng.normal(size=(3, 3))
            while abs(np.linalg.det(B)) < 0.05:
                B = rng.normal(size=(3, 3))
            a = rng.normal(size=3)
            assert stat_gl(whiten(a + X @ B.T)) == pytest.approx(ref, rel=1e-8)


class TestStatLt:
    def test_p1_reduction_factor(self):
        x = np.random.default_rng(7).normal(size=11)
        z = standardize(x)
        n = 11
        # (n+3)(n+1) - 2(n+3) - 2(n+1) + 4 = n^2 - 1
        assert stat_lt(whiten(x[:, None])) == pytest.approx(
            (n * n - 1) * np.sum(z**4), rel=1e-12
        )

    def test_bruteforce_oracle(self):
        rng = np.random.default_rng(8)
        for p in (2, 3):
            Z = whiten(rng.normal(size=(12, p)))
            assert stat_lt(Z) == pytest.approx(_stat_lt_bruteforce(Z), rel=1e-10)

    def test_column_order_dependence(self):
        Z = whiten(np.random.default_rng(9).normal(size=(12, 2)))
        assert stat_lt(Z) != pytest.approx(stat_lt(Z[:, ::-1]))

    def test_lower_triangular_invariance(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(14, 3))
        ref = stat_lt(whiten(X))
        for _ in range(20):
            T0 = np.tril(rng.normal(size=(3, 3)))
            np.fill_diagonal(T0, rng.uniform(0.2, 2.0, size=3))
            a = rng.normal(size=3)
            assert stat_lt(whiten(a + X @ T0.T)) == pytest.approx(ref, rel=1e-8)

    def test_not_invariant_under_rotation(self):
        X = np.random.default_rng(11).normal(size=(14, 2))
        c, s = math.cos(0.7), math.sin(0.7)
        R = np.array([[c, -s], [s, c]])
        assert stat_lt(whiten(X @ R.T)) != pytest.approx(stat_lt(whiten(X)), rel=1e-4)


class TestTriangularMoments:
    def test_p1_closed_forms(self):
        # single term of R at p=1: m + 2 - 2 = m; S matches E[chi_m^4] = m(m+2)
        assert moment_R([1.0], 5.0) == pytest.approx(5.0)
        for m in (3.0, 5.0, 8.0):
            assert moment_S([1.0], m) == pytest.approx(m * (m + 2.0))

    def test_monte_carlo_oracle_p2(self):
        m, p = 4.0, 2
        z = np.array([1.0, 1.0])
        rng = np.random.default_rng(12)
        T = sample_bartlett_lower(m, p, 200_000, rng)
        qf = np.sum((T @ z) ** 2, axis=1)
        np.testing.assert_allclose(moment_R(z, m), qf.mean(), rtol=0.01)
        np.testing.assert_allclose(moment_S(z, m), (qf * qf).mean(), rtol=0.01)

    def test_scaling_in_z(self):
        z = np.array([0.5, -1.5, 2.0])
        np.testing.assert_allclose(moment_R(2.0 * z, 6.0), 4.0 * moment_R(z, 6.0))
        np.testing.assert_allclose(moment_S(2.0 * z, 6.0), 16.0 * moment_S(z, 6.0))


class TestWishartMomentCheck:
    def test_p1_chisquare_mean(self):
        rep = wishart_moment_check(12, 1, 100_000, seed=1, z=np.array([2.0]))
        assert abs(rep["mean"] - rep["mean_target"]) < 3.0 * rep["mean_se"]
        assert rep["mean_target"] == pytest.approx(11.0 * 4.0)

    def test_p2_second_moment(self):
        rep = wishart_moment_check(10, 2, 300_000, seed=2, z=np.array([1.0, 0.0]))
        assert rep["second_moment_target"] == pytest.approx(99.0)
        assert (
            abs(rep["second_moment"] - rep["second_moment_target"])
            < 3.0 * rep["second_moment_se"]
        )

    def test_zero_vector(self):
        rep = wishart_moment_check(8, 2, 1000, seed=3, z=np.zeros(2))
        assert rep["mean"] == 0.0
        assert rep["second_moment"] == 0.0

    def test_requires_n_above_p(self):
        with pytest.raises(ValueError):
            wishart_moment_check(2, 3, 100, seed=0)


class TestDegreesOfFreedomMapping:
    def test_expansion_matches_displayed_statistic(self):
        # summing the triangular second-moment form over whitened rows must
        # reproduce the displayed statistic exactly when the chi diagonals
        # carry m = n - p degrees (plus z-independent terms, which vanish
        # here because the column norms of a whitened Z are fixed)
        rng = np.random.default_rng(13)
        n, p = 8, 2
        for _ in range(5):
            Z = whiten(rng.normal(size=(n, p)))
            expansion = sum(moment_S(z, float(n - p)) for z in Z)
            assert expansion == pytest.approx(stat_lt(Z), rel=1e-12)
            wrong = sum(moment_S(z, float(n - p - 1)) for z in Z)
            assert wrong != pytest.approx(stat_lt(Z), rel=1e-3)
