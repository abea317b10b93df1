"""Stable characteristic function, its alpha-derivative and the inverted score."""

import math

import numpy as np
import pytest
from scipy.integrate import quad, simpson

from lbinorm.errors import AlphaOne
from lbinorm.stable import (
    InversionConfig,
    dcf_dalpha_at_2,
    normal_var2_pdf,
    stable_cf,
    stable_density_derivative,
)


class TestStableCf:
    def test_origin_and_boundary(self):
        assert stable_cf(0.0, 1.5, 0.3) == pytest.approx(1.0)
        # at alpha = 2 the skewness term vanishes for every beta
        assert stable_cf(1.0, 2.0, 0.5) == pytest.approx(math.exp(-1.0))

    def test_symmetric_value(self):
        v = stable_cf(2.0, 1.5, 0.0)
        assert v.real == pytest.approx(math.exp(-(2.0**1.5)))
        assert abs(v.imag) < 1e-15

    def test_modulus_depends_only_on_alpha(self):
        t = np.linspace(-4.0, 4.0, 33)
        for alpha in (0.5, 1.3, 1.9, 2.0):
            for beta in (-1.0, -0.3, 0.4, 1.0):
                np.testing.assert_allclose(
                    np.abs(stable_cf(t, alpha, beta)),
                    np.exp(-np.abs(t) ** alpha),
                    rtol=1e-12,
                )

    def test_excluded_and_invalid_parameters(self):
        with pytest.raises(AlphaOne):
            stable_cf(1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            stable_cf(1.0, 2.5, 0.0)
        with pytest.raises(ValueError):
            stable_cf(1.0, 1.5, 1.5)


class TestDcfDalphaAt2:
    def test_zero_at_unit_frequency_symmetric(self):
        assert dcf_dalpha_at_2(1.0, 0.0) == pytest.approx(0.0)

    def test_closed_form_at_e(self):
        v = dcf_dalpha_at_2(math.e, 0.0)
        assert v.real == pytest.approx(-math.e**2 * math.exp(-math.e**2), rel=1e-12)
        assert v.imag == pytest.approx(0.0)

    def test_finite_difference_grid(self):
        # one-sided second-order difference from below (alpha <= 2)
        h = 1e-5
        for beta in (-1.0, -0.5, 0.0, 0.5, 1.0):
            for t in (0.1, 0.5, 1.0, 2.0, 3.0, 5.0):
                fd = (
                    3.0 * stable_cf(t, 2.0, beta)
                    - 4.0 * stable_cf(t, 2.0 - h, beta)
                    + stable_cf(t, 2.0 - 2.0 * h, beta)
                ) / (2.0 * h)
                an = dcf_dalpha_at_2(t, beta)
                assert abs(an - fd) <= 1e-6 * max(abs(an), 1e-12)

    def test_defined_as_zero_at_origin(self):
        assert dcf_dalpha_at_2(0.0, 0.7) == 0.0


class TestInversionConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            InversionConfig(t_max=4.0)
        with pytest.raises(ValueError):
            InversionConfig(nodes=64)
        with pytest.raises(ValueError):
            InversionConfig(oscillation_splits=1)


class TestStableDensityDerivative:
    def test_origin_against_direct_quadrature(self):
        # symmetric case at x = 0: (1/pi) int_0^inf t^2 log t exp(-t^2) dt
        target, _ = quad(
            lambda t: t * t * math.log(t) * math.exp(-t * t) / math.pi, 0.0, np.inf
        )
        assert stable_density_derivative(0.0, 0.0) == pytest.approx(target, rel=1e-9)

    def test_even_in_x_for_symmetric_case(self):
        for x in (0.5, 1.0, 3.0):
            np.testing.assert_allclose(
                stable_density_derivative(x, 0.0),
                stable_density_derivative(-x, 0.0),
                rtol=1e-12,
            )

    def test_cubic_tail_decay(self):
        # far tail falls off like |x|^-3; the ratio between x=6 and x=5
        # should sit within a factor 2 of the pure power law
        d5 = stable_density_derivative(5.0, 0.0)
        d6 = stable_density_derivative(6.0, 0.0)
        law = (5.0 / 6.0) ** 3
        assert 0.5 * law < d6 / d5 < 2.0 * law

    def test_skewed_case_finite_and_asymmetric(self):
        d_pos = stable_density_derivative(1.0, 0.8)
        d_neg = stable_density_derivative(-1.0, 0.8)
        assert np.isfinite(d_pos) and np.isfinite(d_neg)
        assert d_pos != pytest.approx(d_neg)

    def test_mean_zero_over_real_line(self):
        # the derivative of a density family integrates to zero over R.
        # On [-40, 40] the numerical integral must equal minus the mass of
        # the analytic x^-3 tail (with its x^-5 correction) outside the
        # window: 2 * int_40^inf (x^-3 + 12 x^-5) dx.
        x = np.linspace(-40.0, 40.0, 8001)
        vals = stable_density_derivative(x, 0.0)
        integral = simpson(vals, x=x)
        tail = 2.0 * (1.0 / (2.0 * 40.0**2) + 12.0 / (4.0 * 40.0**4))
        assert abs(integral + tail) < 1e-6


class TestScoreStable:
    def test_even_symmetry(self, stable_score0):
        assert stable_score0(1.0) == pytest.approx(stable_score0(-1.0), rel=1e-10)
        assert stable_score0(1.0) != pytest.approx(-stable_score0(-1.0))

    def test_spline_matches_direct_inversion(self, stable_score0):
        for x in (0.3337, 2.71, 7.777, -11.2):
            direct = stable_density_derivative(x, 0.0) / normal_var2_pdf(x)
            assert stable_score0(x) == pytest.approx(direct, rel=1e-6)

    def test_outside_grid_falls_back_to_direct(self, stable_score0):
        x = 13.5
        direct = stable_density_derivative(x, 0.0, check=False) / normal_var2_pdf(x)
        assert stable_score0(x) == pytest.approx(direct, rel=1e-12)

    def test_tail_magnitude(self, stable_score0):
        # score grows like exp(x^2/4)/x^3 (up to a bounded constant)
        for x in (5.0, 6.0, 7.0, 8.0):
            ref = math.exp(x * x / 4.0) / x**3
            assert 0.1 * ref < abs(stable_score0(x)) < 10.0 * ref

    def test_mean_zero_up_to_tail_mass(self, stable_score0):
        # int score * f0 over [-12, 12] equals the density-derivative mass
        # inside the window; the deficit is the analytic x^-3 tail mass
        x = np.linspace(-12.0, 12.0, 4801)
        integral = simpson(stable_score0(x) * normal_var2_pdf(x), x=x)
        tail = 2.0 * (1.0 / (2.0 * 12.0**2) + 12.0 / (4.0 * 12.0**4))
        assert abs(integral) > 5e-3  # the window integral itself is not zero
        assert abs(integral + tail) < 1e-4

    def test_vectorized_evaluation(self, stable_score0):
        x = np.array([-13.0, -1.0, 0.0, 2.5, 13.0])
        out = stable_score0(x)
        assert out.shape == x.shape
        assert np.all(np.isfinite(out))
