"""Tests of the Mittag-Leffler evaluator on the negative real axis.

Expected values marked "frozen" were computed once with an independent
high-precision oracle (mpmath arbitrary-precision summation / quadrature of
the complete-monotonicity integral) and hard-coded here.
"""

import numpy as np
import pytest
from scipy.special import erfcx

from subdiff.mittag_leffler import (
    ASYMPTOTIC_MIN_X,
    MLArg,
    ml_asymptotic,
    ml_contour,
    ml_eval,
    ml_eval_array,
    ml_series,
    asymptotic_crossover,
    decay_bounds,
)

ALPHAS = [0.1, 0.25, 0.5, 0.75, 0.9]

# mpmath oracle: E_{1/2,1}(-100) = exp(1e4)*erfc(100), evaluated at 60 digits
ML_HALF_100 = 5.6416137829894329e-03
# mpmath oracle: E_{1/4,1}(-1e6) by the complete-monotonicity integral
ML_QUARTER_1E6 = 8.1604837490895525e-07


def relerr(a, b):
    return abs(a - b) / abs(b)


class TestSeries:
    def test_value_at_zero(self):
        assert ml_series(MLArg(0.5, 1.0, 0.0)) == 1.0

    def test_alpha_one_is_exponential(self):
        assert relerr(ml_series(MLArg(1.0, 1.0, 1.0)), np.exp(-1.0)) < 1e-15

    def test_beta_half_at_zero(self):
        # k = 0 term only: 1/gamma(1/2)
        got = ml_series(MLArg(0.5, 0.5, 0.0))
        assert abs(got - 0.5641895835477563) < 1e-15

    def test_rejects_large_x(self):
        with pytest.raises(ValueError, match="series"):
            ml_series(MLArg(0.5, 1.0, 2.0))

    def test_override_threshold(self):
        got = ml_series(MLArg(0.5, 1.0, 2.0), x_max=5.0)
        assert relerr(got, erfcx(2.0)) < 1e-13


class TestAsymptotic:
    def test_matches_high_precision_series(self):
        got = ml_asymptotic(MLArg(0.5, 1.0, 100.0))
        assert relerr(got, ML_HALF_100) <= 1e-10

    def test_alpha_one_degenerates_to_zero(self):
        # all algebraic terms sit on gamma poles; expansion is identically 0,
        # consistent with e^-50 ~ 1.9e-22 below the expansion's resolution
        assert ml_asymptotic(MLArg(1.0, 1.0, 50.0)) == 0.0

    def test_containment_in_decay_bounds(self):
        got = ml_asymptotic(MLArg(0.25, 1.0, 1e6))
        b = decay_bounds(0.25, 1e6)
        assert b.lower <= got <= b.upper
        assert relerr(got, ML_QUARTER_1E6) < 1e-12

    def test_rejects_small_x(self):
        with pytest.raises(ValueError, match="asymptotic"):
            ml_asymptotic(MLArg(0.5, 1.0, 2.0))


class TestEval:
    def test_exponential_case(self):
        assert relerr(ml_eval(MLArg(1.0, 1.0, 2.5)), np.exp(-2.5)) < 1e-15

    def test_erfc_identity_point(self):
        # E_{1/2,1}(-x) = e^{x^2} erfc(x); erfcx is the independent oracle
        got = ml_eval(MLArg(0.5, 1.0, 1.0))
        assert relerr(got, erfcx(1.0)) <= 1e-12

    def test_point_within_bounds(self):
        # 1/(1 + gamma(1/2)) and 1/(1 + 1/gamma(3/2)), computed directly
        b = decay_bounds(0.5, 1.0)
        assert abs(b.lower - 0.3606913) < 1e-6
        assert abs(b.upper - 0.4698411) < 1e-6
        assert b.lower <= ml_eval(MLArg(0.5, 1.0, 1.0)) <= b.upper

    def test_beta_not_one_rejected_off_series_domain(self):
        with pytest.raises(ValueError, match="beta"):
            ml_eval(MLArg(0.5, 0.5, 5.0))

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            MLArg(0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            MLArg(1.5, 1.0, 1.0)
        with pytest.raises(ValueError):
            MLArg(0.5, -1.0, 1.0)
        with pytest.raises(ValueError):
            MLArg(0.5, 1.0, -2.0)
        with pytest.raises(ValueError):
            MLArg(0.5, 1.0, np.nan)


class TestBounds:
    def test_equal_one_at_zero(self):
        b = decay_bounds(0.5, 0.0)
        assert b.lower == 1.0 and b.upper == 1.0

    def test_frozen_values_large_argument(self):
        # direct evaluation with gamma(0.75) = 1.2254167, gamma(1.25) = 0.9064025
        b = decay_bounds(0.25, 1e6)
        assert abs(b.lower - 8.160483e-07) < 1e-12
        assert abs(b.upper - 9.064017e-07) < 1e-12

    def test_ordering_invariant(self):
        for a in ALPHAS:
            for x in np.geomspace(1e-6, 1e8, 30):
                b = decay_bounds(a, x)
                assert 0.0 < b.lower <= b.upper <= 1.0

    def test_rejects_alpha_outside_open_interval(self):
        with pytest.raises(ValueError):
            decay_bounds(1.0, 1.0)
        with pytest.raises(ValueError):
            decay_bounds(0.0, 1.0)


class TestInvariants:
    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_sandwich(self, alpha):
        # the inequalities are strict in exact arithmetic; at x ~ 1e-8 the
        # bound and the function agree to ~1e-17, below double spacing, so a
        # 1e-15 representation cushion is needed for the comparison itself
        grid = np.concatenate([[0.0], np.geomspace(1e-8, 1e8, 99)])
        vals = ml_eval_array(alpha, grid)
        for x, v in zip(grid, vals):
            b = decay_bounds(alpha, x) if alpha < 1 else None
            assert v >= b.lower * (1.0 - 1e-15)
            assert v <= b.upper * (1.0 + 1e-15)

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_positive_and_nonincreasing(self, alpha):
        grid = np.concatenate([[0.0], np.geomspace(1e-8, 1e8, 99)])
        vals = ml_eval_array(alpha, grid)
        assert np.all(vals > 0.0)
        assert np.all(np.diff(vals) <= 0.0)

    def test_exponential_reduction(self):
        xs = np.linspace(0.0, 30.0, 301)
        vals = ml_eval_array(1.0, xs)
        assert np.all(np.abs(vals - np.exp(-xs)) <= 1e-12 * np.exp(-xs))

    def test_erfc_identity_sweep(self):
        xs = np.geomspace(1e-3, 20.0, 200)
        vals = ml_eval_array(0.5, xs)
        ref = erfcx(xs)
        assert np.max(np.abs(vals - ref) / ref) <= 1e-10

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_crossover_continuity(self, alpha):
        # series vs contour at x = 1
        s = ml_series(MLArg(alpha, 1.0, 1.0))
        c = ml_contour(alpha, 1.0)
        assert abs(s - c) <= 1e-10
        # contour vs asymptotic at the dispatcher's upper crossover
        xc = asymptotic_crossover(alpha)
        c2 = ml_contour(alpha, xc)
        a2 = ml_asymptotic(MLArg(alpha, 1.0, xc), x_min=xc)
        assert abs(c2 - a2) <= 1e-10

    def test_scalar_and_array_paths_agree(self):
        xs = np.geomspace(1e-2, 1e6, 40)
        for alpha in ALPHAS:
            arr = ml_eval_array(alpha, xs)
            sca = np.array([ml_eval(MLArg(alpha, 1.0, x)) for x in xs])
            assert np.max(np.abs(arr - sca)) <= 1e-14 * np.max(np.abs(sca))

    def test_crossover_respects_floor(self):
        assert asymptotic_crossover(0.1) == ASYMPTOTIC_MIN_X
        assert asymptotic_crossover(0.9) > ASYMPTOTIC_MIN_X
