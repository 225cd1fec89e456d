import math

import numpy as np
import pytest

from quadinr import taylor
from quadinr.activations import Family, af_eval
from quadinr.taylor import Parity, TaylorSeries, Variable


class TestCoefficients:
    def test_sine_four_terms(self):
        s = taylor.taylor_coeffs(Family.SINE, 4)
        assert s.degrees == (1, 3, 5, 7)
        assert s.values == (1.0, -1 / 6, 1 / 120, -1 / 5040)
        assert s.parity is Parity.ODD

    def test_sinc_is_sine_divided_by_x(self):
        sine = taylor.taylor_coeffs(Family.SINE, 4)
        sinc = taylor.taylor_coeffs(Family.SINC, 4)
        assert sinc.degrees == (0, 2, 4, 6)
        assert sinc.values == sine.values
        # pointwise: x * sinc_series(x) == sine_series(x)
        x = np.linspace(0.1, 2.0, 50)
        np.testing.assert_allclose(x * taylor.series_eval(sinc, x),
                                   taylor.series_eval(sine, x), rtol=1e-14)

    def test_gaussian_terms(self):
        s = taylor.taylor_coeffs(Family.GAUSSIAN, 3)
        assert s.degrees == (0, 2, 4)
        assert s.values == (1.0, -1.0, 0.5)

    def test_quad_exact_branch(self):
        s = taylor.taylor_coeffs(Family.QUAD, 2)
        assert s.coeffs == ((1, 2.0), (2, -1.0))
        assert s.max_err == 0.0
        with pytest.raises(ValueError):
            taylor.taylor_coeffs(Family.QUAD, 3)

    def test_relu_has_no_expansion(self):
        with pytest.raises(ValueError):
            taylor.taylor_coeffs(Family.RELU, 4)

    def test_wire_composite_is_the_factor_convolution(self):
        """Composite coefficients equal a brute-force polynomial product."""
        n = 9
        s = taylor.taylor_coeffs(Family.WIRE, n)
        deg = 2 * (n - 1)
        conv = np.zeros(deg + 1)
        for k in range(deg // 2 + 1):           # gaussian factor
            for j in range(deg // 2 + 1):       # cosine factor
                d = 2 * (k + j)
                if d <= deg:
                    conv[d] += ((-1.0) ** k / math.factorial(k)
                                * (-1.0) ** j / math.factorial(2 * j))
        for d, c in s.coeffs:
            assert c == pytest.approx(conv[d], rel=1e-13)

    def test_series_validation(self):
        with pytest.raises(ValueError):
            TaylorSeries(Family.SINE, Parity.ODD, ((1, 1.0), (2, 0.5)),
                         Variable.X, 2.0, 0.0, 2)
        with pytest.raises(ValueError):
            TaylorSeries(Family.SINE, Parity.ODD, ((3, 1.0), (1, 0.5)),
                         Variable.X, 2.0, 0.0, 2)


class TestSeriesEval:
    def test_odd_series_at_zero(self):
        s = taylor.taylor_coeffs(Family.SINE, 4)
        assert taylor.series_eval(s, 0.0) == 0.0

    def test_even_series_constant(self):
        s = taylor.taylor_coeffs(Family.GAUSSIAN, 5)
        assert taylor.series_eval(s, 0.0) == 1.0

    def test_sine_four_terms_at_two(self):
        s = taylor.taylor_coeffs(Family.SINE, 4)
        got = taylor.series_eval(s, 2.0)
        assert got == pytest.approx(2 - 8 / 6 + 32 / 120 - 128 / 5040, rel=1e-15)
        assert got == pytest.approx(0.9079, abs=1e-4)
        assert abs(got - math.sin(2.0)) < 0.01 * 1.0

    def test_quad_sign_symmetry(self):
        s = taylor.taylor_coeffs(Family.QUAD, 2)
        x = np.linspace(-2.0, 2.0, 101)
        np.testing.assert_allclose(taylor.series_eval(s, x), af_eval(Family.QUAD, x),
                                   atol=1e-15)

    def test_finer_z_substitution(self):
        sz = taylor.min_terms(Family.FINER, 2.0)
        sine_like = TaylorSeries(Family.SINE, sz.parity, sz.coeffs, Variable.X,
                                 sz.range_half_width, sz.max_err, sz.term_count)
        rng = np.random.default_rng(0)
        x = rng.uniform(-2.0, 2.0, 1000)
        z = (np.abs(x) + 1.0) * x
        np.testing.assert_array_equal(taylor.series_eval(sz, x),
                                      taylor.series_eval(sine_like, z))


class TestMaxNormError:
    def test_quad_is_exact(self):
        s = taylor.taylor_coeffs(Family.QUAD, 2)
        assert taylor.max_norm_error(s) == 0.0

    def test_sine_four_terms_range_two(self):
        # certified error is the remainder bound 2**9/9!; the span of sin on
        # [-2, 2] is 2
        s = taylor.taylor_coeffs(Family.SINE, 4, 2.0)
        expect = (2.0**9 / math.factorial(9)) / 2.0
        assert taylor.max_norm_error(s) == pytest.approx(expect, rel=1e-6)

    def test_sine_one_term_range_one(self):
        # bound 1/3! dominates the grid scan; span is 2*sin(1)
        s = taylor.taylor_coeffs(Family.SINE, 1, 1.0)
        expect = (1.0 / 6.0) / (2.0 * math.sin(1.0))
        assert taylor.max_norm_error(s) == pytest.approx(expect, rel=1e-6)

    def test_grid_error_below_alternating_bound(self):
        """The measured scan never exceeds the first-omitted-term bound."""
        for family, rng_hw, terms in ((Family.SINE, 2.0, 4), (Family.SINE, 1.0, 2),
                                      (Family.GAUSSIAN, 2.0, 14), (Family.SINC, 2.0, 4),
                                      (Family.FINER, 1.0, 4)):
            s = taylor.taylor_coeffs(family, terms, rng_hw)
            grid = np.linspace(-rng_hw, rng_hw, taylor.GRID_POINTS)
            scan = float(np.max(np.abs(taylor.series_eval(s, grid)
                                       - af_eval(family, grid))))
            assert scan <= taylor._remainder_bound(s) * (1 + 1e-12)


class TestMinTerms:
    # (family, range) -> expected (terms, max degree) under the certified
    # peak-to-peak convention; values frozen from the quadrature/grid oracle
    EXPECTED = {
        (Family.SINE, 2.0): (4, 7),
        (Family.SINE, 1.0): (2, 3),
        (Family.SINC, 2.0): (4, 6),
        (Family.SINC, 1.0): (3, 4),
        (Family.QUAD, 2.0): (2, 2),
        (Family.QUAD, 1.0): (2, 2),
        (Family.GAUSSIAN, 2.0): (14, 26),
        (Family.GAUSSIAN, 1.0): (6, 10),
        (Family.WIRE, 2.0): (16, 30),
        (Family.WIRE, 1.0): (6, 10),
        (Family.FINER, 2.0): (9, 17),
        (Family.FINER, 1.0): (4, 7),
    }

    @pytest.mark.parametrize("family,rhw", sorted(EXPECTED, key=str))
    def test_accepted_counts(self, family, rhw):
        s = taylor.min_terms(family, rhw)
        assert (s.term_count, s.max_degree) == self.EXPECTED[(family, rhw)]
        assert s.max_err <= taylor.DEFAULT_BUDGET
        if family is not Family.QUAD:
            # one term fewer must overshoot the budget
            smaller = taylor.taylor_coeffs(family, s.term_count - 1, rhw)
            assert taylor.max_norm_error(smaller) > taylor.DEFAULT_BUDGET

    def test_monotone_across_ranges(self):
        for family in (Family.SINE, Family.GAUSSIAN, Family.WIRE, Family.FINER,
                       Family.SINC, Family.QUAD):
            narrow = taylor.min_terms(family, 1.0)
            wide = taylor.min_terms(family, 2.0)
            assert narrow.term_count <= wide.term_count

    def test_finer_reports_in_z(self):
        s = taylor.min_terms(Family.FINER, 2.0)
        assert s.variable is Variable.Z

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            taylor.min_terms(Family.SINE, 2.0, budget=0.0)

    def test_impossible_budget_fails_loudly(self):
        with pytest.raises(taylor.ConvergenceError):
            taylor.min_terms(Family.FINER, 2.0, budget=1e-300)
