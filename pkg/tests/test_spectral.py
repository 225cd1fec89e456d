import math

import numpy as np
import pytest

from quadinr import spectral
from quadinr.activations import Family, quad_eval


class TestFourierCoefficients:
    def test_analytic_values(self):
        assert spectral.fourier_b_analytic(1) == pytest.approx(1.032, abs=5e-4)
        assert spectral.fourier_b_analytic(2) == 0.0
        assert spectral.fourier_b_analytic(3) == pytest.approx(32 / (27 * math.pi**3),
                                                               rel=1e-12)
        with pytest.raises(ValueError):
            spectral.fourier_b_analytic(0)

    def test_quadrature_matches_closed_form(self):
        for n in range(1, 22, 2):
            analytic = 32.0 / (math.pi**3 * n**3)
            numeric = spectral.fourier_b_numeric(n, 4097)
            assert abs(numeric - analytic) <= 1e-4

    def test_even_harmonics_vanish(self):
        assert abs(spectral.fourier_b_numeric(2, 4097)) <= 1e-8
        assert abs(spectral.fourier_b_numeric(10, 4097)) <= 1e-8

    def test_fifth_harmonic(self):
        assert spectral.fourier_b_numeric(5, 4097) == pytest.approx(
            32 / (125 * math.pi**3), abs=1e-5)

    def test_quadrature_validation(self):
        with pytest.raises(ValueError):
            spectral.fourier_b_numeric(1, 512)   # too coarse to trust
        with pytest.raises(ValueError):
            spectral.fourier_b_numeric(1, 4096)  # Simpson needs odd counts

    def test_published_third_harmonic_is_an_n_cubed_slip(self):
        # the rounded 0.129 equals b1/8; the true b3 is b1/27
        b1 = spectral.fourier_b_analytic(1)
        assert 0.129 == pytest.approx(b1 / 8, abs=5e-4)
        assert spectral.fourier_b_analytic(3) == pytest.approx(b1 / 27, rel=1e-12)


class TestFourierPartialSum:
    def test_single_term(self):
        assert spectral.fourier_partial_sum(1.0, 0) == pytest.approx(1.0320491018623839)

    def test_zero_everywhere_at_origin(self):
        for k in (0, 3, 100):
            assert spectral.fourier_partial_sum(0.0, k) == 0.0

    def test_converges_to_activation(self):
        assert spectral.fourier_partial_sum(1.0, 50) == pytest.approx(1.0, abs=1e-3)
        x = np.linspace(-2.0, 2.0, 401)
        dev = np.max(np.abs(spectral.fourier_partial_sum(x, 100) - quad_eval(x)))
        assert dev <= 2e-3


class TestNtkEmpirical:
    def test_sine_at_origin_weights(self):
        v = np.array([0.3, -0.2])
        omega0 = 5.0
        got = spectral.ntk_empirical(Family.SINE, np.zeros(2), 0.0, v, v, omega0=omega0)
        assert got == pytest.approx(omega0**2 * (v @ v + 1.0), rel=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            W = rng.normal(size=3)
            b = float(rng.normal())
            x1, x2 = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
            a = spectral.ntk_empirical(Family.QUAD, W, b, x1, x2, omega0=1.7)
            c = spectral.ntk_empirical(Family.QUAD, W, b, x2, x1, omega0=1.7)
            assert a == pytest.approx(c, rel=1e-14)

    def test_matches_finite_difference_parameter_gradients(self):
        rng = np.random.default_rng(4)
        h = 1e-6
        for _ in range(20):
            d = int(rng.integers(1, 4))
            W = rng.normal(size=d) * 0.3
            b = float(rng.normal() * 0.3)
            omega0 = float(rng.uniform(0.5, 3.0))
            x1, x2 = rng.uniform(-1, 1, d), rng.uniform(-1, 1, d)

            def f(params, x):
                return math.sin(omega0 * (params[:-1] @ x + params[-1]))

            p0 = np.concatenate([W, [b]])
            g1 = np.zeros_like(p0)
            g2 = np.zeros_like(p0)
            for i in range(p0.size):
                e = np.zeros_like(p0)
                e[i] = h
                g1[i] = (f(p0 + e, x1) - f(p0 - e, x1)) / (2 * h)
                g2[i] = (f(p0 + e, x2) - f(p0 - e, x2)) / (2 * h)
            emp = spectral.ntk_empirical(Family.SINE, W, b, x1, x2, omega0=omega0)
            assert emp == pytest.approx(float(g1 @ g2), abs=1e-6, rel=1e-5)

    def test_nonfinite_parameters_rejected(self):
        with pytest.raises(ValueError):
            spectral.ntk_empirical(Family.SINE, np.array([np.nan]), 0.0, [0.1], [0.1])


class TestClosedForms:
    def test_siren_trivial_points(self):
        z0 = np.zeros(1)
        assert spectral.ntk_closed_siren(1.0, 0.0, 0.0, z0, z0) == 1.0
        assert spectral.ntk_closed_siren(1.0, math.pi / 2, 0.3, z0, z0) == \
            pytest.approx(0.0, abs=1e-15)

    def test_siren_equals_empirical(self):
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(1000):
            d = int(rng.integers(1, 4))
            W = rng.normal(size=d)
            b = float(rng.normal())
            omega0 = float(rng.uniform(0.5, 8.0))
            x1, x2 = rng.uniform(-1, 1, d), rng.uniform(-1, 1, d)
            z1, z2 = float(W @ x1 + b), float(W @ x2 + b)
            emp = spectral.ntk_empirical(Family.SINE, W, b, x1, x2, omega0=omega0)
            closed = spectral.ntk_closed_siren(omega0, z1, z2, x1, x2)
            worst = max(worst, abs(emp - closed) / max(1e-300, abs(closed)))
        assert worst <= 1e-9

    def test_quad_published_factor_verbatim(self):
        z0 = np.zeros(1)
        assert spectral.ntk_closed_quad(1.0, 0.0, 0.0, z0, z0, variant="published") == 1.0
        got = spectral.ntk_closed_quad(2.0, 0.1, 0.1, z0, z0, variant="published")
        assert got == pytest.approx(7.84, rel=1e-12)

    def test_quad_swap_symmetry(self):
        x1 = np.array([0.2, -0.4])
        x2 = np.array([-0.1, 0.9])
        for variant in ("published", "derived"):
            a = spectral.ntk_closed_quad(1.3, 0.2, -0.4, x1, x2, variant=variant)
            b = spectral.ntk_closed_quad(1.3, -0.4, 0.2, x2, x1, variant=variant)
            assert a == pytest.approx(b, rel=1e-14)

    def test_empirical_decides_the_quad_candidate(self):
        cmp = spectral.ntk_quad_comparison(trials=500, seed=0, tol=1e-6)
        assert cmp["empirical_matches"] == "derived"
        assert cmp["matches"]["derived"] is True
        assert cmp["matches"]["published"] is False

    def test_scaling_contrast_grid_statement(self):
        c = spectral.ntk_scaling_contrast(z=1.0)
        assert c["quad_monotone_increasing"] is True
        assert np.all(np.diff(c["quad_values_published_form"]) > 0)
        assert c["siren_diff_sign_changes"] >= 1
