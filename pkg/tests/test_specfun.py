import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp

from schroflow.specfun import (PolySpec, bessel_j, bessel_j_series, eval_P,
                               gamma_fn, j_scaled, legendre_p, pochhammer,
                               real_sph_harm, sph_harm)


class TestGamma:
    def test_half_integer_values(self):
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
        assert gamma_fn(7.5) == pytest.approx(float(mpmath.gamma(7.5)), rel=1e-14)
        assert gamma_fn(1.25) == pytest.approx(float(mpmath.gamma(1.25)), rel=1e-14)

    def test_integer_factorial(self):
        assert gamma_fn(6) == 120.0

    @pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
    def test_poles_raise(self, x):
        with pytest.raises(ValueError):
            gamma_fn(x)

    def test_reflection_near_pole(self):
        # negative non-integer arguments are fine
        assert gamma_fn(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-14)


class TestPochhammer:
    def test_known_values(self):
        assert pochhammer(3.0, 0) == 1.0
        assert pochhammer(3.0, 4) == 3 * 4 * 5 * 6
        assert pochhammer(0.5, 3) == pytest.approx(0.5 * 1.5 * 2.5)

    def test_one_gives_factorial(self):
        for n in range(10):
            assert pochhammer(1.0, n) == math.factorial(n)

    @given(st.floats(-10, 10, allow_nan=False), st.integers(0, 30))
    def test_recurrence(self, s, i):
        assert pochhammer(s, i + 1) == pytest.approx(
            pochhammer(s, i) * (s + i), rel=1e-12, abs=1e-12)

    def test_negative_index_raises(self):
        with pytest.raises(ValueError):
            pochhammer(1.0, -1)


class TestBesselJ:
    @pytest.mark.parametrize("nu,r", [(0.0, 1.0), (1.5, 2.0), (0.3, 5.0),
                                      (4.0, 0.1), (2.5, 11.0)])
    def test_series_matches_mpmath(self, nu, r):
        ref = float(mpmath.besselj(nu, r))
        assert bessel_j_series(nu, r) == pytest.approx(ref, rel=1e-12, abs=1e-15)

    def test_half_order_closed_form(self):
        r = np.linspace(0.1, 20.0, 50)
        ref = np.sqrt(2.0 / (math.pi * r)) * np.sin(r)
        assert np.allclose(bessel_j(0.5, r), ref, rtol=1e-10, atol=1e-12)

    def test_series_large_argument_overlap(self):
        # the two evaluation branches agree near the switchover radius
        for nu in (0.0, 0.5, 1.5, 3.7, 7.0):
            cut = max(12.0, 2.0 * nu)
            r = np.linspace(cut - 2.0, cut + 2.0, 21)
            dev = np.abs(bessel_j_series(nu, r) - sp.jv(nu, r))
            assert dev.max() <= 1e-9

    def test_three_term_recurrence(self):
        rng = np.random.default_rng(7)
        nus = rng.uniform(1.0, 6.0, 10)
        rs = rng.uniform(0.5, 25.0, 10)
        for nu in nus:
            for r in rs:
                lhs = bessel_j(nu - 1.0, r) + bessel_j(nu + 1.0, r)
                rhs = (2.0 * nu / r) * bessel_j(nu, r)
                assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(bessel_j(nu, r)))

    def test_zero_argument(self):
        assert bessel_j(0.0, 0.0) == 1.0
        assert bessel_j(2.0, 0.0) == 0.0

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            bessel_j(-1.0, 1.0)
        with pytest.raises(ValueError):
            bessel_j(1.0, -0.5)


class TestJScaled:
    def test_free_three_dim_is_sinc(self):
        # alpha=0, N=3: j_0(r) = sqrt(2/pi) sin(r)/r
        r = np.linspace(0.05, 30.0, 200)
        ref = math.sqrt(2.0 / math.pi) * np.sin(r) / r
        assert np.allclose(j_scaled(3, 0.0, r), ref, rtol=1e-10, atol=1e-12)

    def test_weighted_value_at_zero(self):
        for N, alpha in [(3, 0.25), (3, -1.0), (2, 0.0)]:
            order = -alpha + (N - 2) / 2.0
            expect = 2.0 ** (-order) / gamma_fn(order + 1.0)
            assert j_scaled(N, alpha, 0.0, weighted=True) == pytest.approx(
                expect, rel=1e-14)

    def test_weighted_continuity_at_switchover(self):
        # the scaled series (r < 0.5) and the direct quotient agree across 0.5
        for N, alpha in [(3, 0.25), (3, -0.9), (4, -0.3)]:
            below = j_scaled(N, alpha, 0.4999, weighted=True)
            above = j_scaled(N, alpha, 0.5001, weighted=True)
            assert abs(below - above) < 1e-4 * max(abs(below), 1e-3)
            r = 0.8
            direct = r ** alpha * j_scaled(N, alpha, r)
            assert j_scaled(N, alpha, r, weighted=True) == pytest.approx(
                direct, rel=1e-12)

    def test_singular_growth(self):
        # alpha > 0 gives an r^{-alpha} singularity at the origin
        assert j_scaled(3, 0.25, 1e-4) > j_scaled(3, 0.25, 1e-2) > 0

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            j_scaled(3, 2.0, 1.0)  # -alpha + 1/2 < 0


class TestPolySpec:
    def test_degree_zero_is_one(self):
        p = PolySpec(0, 1.5)
        assert p(0.3) == 1.0

    def test_matches_confluent_hypergeometric(self):
        for n in range(0, 9):
            for b in (0.5, 1.25, 2.0, 3.75):
                p = PolySpec(n, b)
                for t in (0.0, 0.3, 1.7, 6.0):
                    ref = float(mpmath.hyp1f1(-n, b, t))
                    assert p(t) == pytest.approx(ref, rel=1e-11, abs=1e-13)

    def test_matches_generalized_laguerre(self):
        # sum_i (-n)_i/(b)_i t^i/i! = n!/(b)_n * L_n^{(b-1)}(t)
        t = np.linspace(0.0, 12.0, 40)
        for n in range(0, 13):
            for b in (0.75, 1.25, 2.5):
                p = PolySpec(n, b)
                scale = math.factorial(n) / pochhammer(b, n)
                ref = scale * sp.eval_genlaguerre(n, b - 1.0, t)
                dev = np.max(np.abs(p(t) - ref) / np.maximum(np.abs(ref), 1.0))
                assert dev <= 1e-10

    def test_eval_alias(self):
        p = PolySpec(2, 1.5)
        assert eval_P(p, 0.7) == p(0.7)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            PolySpec(-1, 1.0)
        with pytest.raises(ValueError):
            PolySpec(2, 0.0)


class TestLegendre:
    def test_p4_value(self):
        assert legendre_p(4, 0.7) == pytest.approx(-0.4120625, abs=1e-14)

    def test_matches_scipy(self):
        x = np.linspace(-1.0, 1.0, 101)
        for l in range(0, 20):
            assert np.allclose(legendre_p(l, x), sp.eval_legendre(l, x),
                               rtol=1e-12, atol=1e-12)

    @settings(max_examples=50)
    @given(st.integers(0, 30), st.floats(-1.0, 1.0))
    def test_bounded_by_one(self, l, x):
        assert abs(legendre_p(l, x)) <= 1.0 + 1e-12

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            legendre_p(3, 1.5)


class TestSphHarm:
    def test_low_order_values(self):
        assert sph_harm(0, 0, 0.3, 1.1) == pytest.approx(
            1.0 / math.sqrt(4 * math.pi))
        theta = 0.8
        assert sph_harm(1, 0, theta, 0.0) == pytest.approx(
            math.sqrt(3.0 / (4 * math.pi)) * math.cos(theta))
        # Condon-Shortley: Y_1^1 at the equator is negative real
        assert sph_harm(1, 1, math.pi / 2, 0.0).real == pytest.approx(
            -math.sqrt(3.0 / (8 * math.pi)))

    def test_conjugation_symmetry(self):
        for l in range(1, 5):
            for m in range(1, l + 1):
                y = sph_harm(l, m, 0.7, 1.3)
                y_neg = sph_harm(l, -m, 0.7, 1.3)
                assert y_neg == pytest.approx((-1) ** m * np.conj(y), rel=1e-12)

    def test_orthonormality_by_quadrature(self):
        x, w = np.polynomial.legendre.leggauss(24)
        theta = np.arccos(x)
        nphi = 48
        phi = 2 * math.pi * np.arange(nphi) / nphi
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        ww = np.repeat(w * 2 * math.pi / nphi, nphi)
        pairs = [(l, m) for l in range(5) for m in range(-l, l + 1)]
        Y = np.array([sph_harm(l, m, tt, pp).ravel() for l, m in pairs])
        gram = (Y * ww) @ Y.conj().T
        assert np.max(np.abs(gram - np.eye(len(pairs)))) < 1e-12

    def test_real_basis_orthonormal(self):
        x, w = np.polynomial.legendre.leggauss(24)
        theta = np.arccos(x)
        nphi = 48
        phi = 2 * math.pi * np.arange(nphi) / nphi
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        ww = np.repeat(w * 2 * math.pi / nphi, nphi)
        pairs = [(l, m) for l in range(4) for m in range(-l, l + 1)]
        Y = np.array([np.asarray(real_sph_harm(l, m, tt, pp)).ravel()
                      for l, m in pairs])
        gram = (Y * ww) @ Y.T
        assert np.max(np.abs(gram - np.eye(len(pairs)))) < 1e-12

    def test_invalid_m(self):
        with pytest.raises(ValueError):
            sph_harm(1, 2, 0.0, 0.0)
