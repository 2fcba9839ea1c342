"""Grid construction, series arithmetic, interpolation, and segment integrals."""

import numpy as np
import pytest

from l1rec.chebyshev import (
    Basis,
    ChebSeries,
    build_grid,
    differentiate,
    first_to_second,
    integral_secondkind_segment,
    interpolate_on_grid,
    second_to_first,
)


def u_series(coeffs):
    return ChebSeries(Basis.SECOND, coeffs)


def t_series(coeffs):
    return ChebSeries(Basis.FIRST, coeffs)


class TestBuildGrid:
    def test_n0(self):
        g = build_grid(0)
        assert g.points == pytest.approx([0.0], abs=0)
        assert g.weights == pytest.approx([np.pi / 2], rel=1e-15)

    def test_n1(self):
        g = build_grid(1)
        assert g.points == pytest.approx([-0.5, 0.5], rel=1e-15)
        assert g.weights == pytest.approx([np.pi * np.sqrt(3) / 6] * 2, rel=1e-14)

    def test_n3_cosine_formula(self):
        g = build_grid(3)
        assert g.points[0] == pytest.approx(np.cos(4 * np.pi / 5), rel=1e-15)
        assert g.points[0] == pytest.approx(-0.809017, abs=1e-6)

    @pytest.mark.parametrize("N", [0, 1, 2, 5, 17, 64])
    def test_invariants(self, N):
        g = build_grid(N)
        j = np.arange(N + 1)
        explicit = np.cos((N + 1 - j) * np.pi / (N + 2))
        assert np.max(np.abs(g.points - explicit)) < 1e-15
        assert np.all(np.diff(g.points) > 0)
        assert np.all(g.weights > 0)
        # exact symmetry in floating point
        assert np.all(g.points == -g.points[::-1])
        assert np.all(g.weights == g.weights[::-1])

    @pytest.mark.parametrize("N", [1, 4, 9, 30])
    def test_gauss_exactness(self, N):
        # applying the weights to g(x)*sqrt(1-x^2) reproduces
        # int g(x) sqrt(1-x^2) dx for deg g <= 2N+1; in the T basis,
        # int T_k sqrt(1-x^2) = pi/2 (k=0), -pi/4 (k=2), 0 otherwise.
        g = build_grid(N)
        rng = np.random.default_rng(7)
        coeffs = rng.standard_normal(2 * N + 2)
        p = t_series(coeffs)
        exact = coeffs[0] * np.pi / 2
        if len(coeffs) > 2:
            exact -= coeffs[2] * np.pi / 4
        quad = float(np.dot(g.weights, p(g.points) * g.sines))
        assert quad == pytest.approx(exact, rel=1e-12, abs=1e-13)


class TestEval:
    def test_t5_at_1(self):
        assert t_series([0, 0, 0, 0, 0, 1.0])(1.0) == pytest.approx(1.0, abs=1e-14)

    def test_u1(self):
        assert u_series([0, 1.0])(0.3) == pytest.approx(0.6, abs=1e-15)

    def test_u2(self):
        assert u_series([0, 0, 1.0])(0.5) == pytest.approx(0.0, abs=1e-15)

    def test_matches_numpy_first_kind(self):
        rng = np.random.default_rng(0)
        c = rng.standard_normal(30)
        x = rng.uniform(-1, 1, 100)
        mine = t_series(c)(x)
        ref = np.polynomial.chebyshev.chebval(x, c)
        assert np.max(np.abs(mine - ref)) < 1e-13 * np.max(np.abs(c))


class TestBasisConversion:
    def test_t1_is_half_u1(self):
        assert first_to_second([0.0, 1.0]) == pytest.approx([0.0, 0.5])

    @pytest.mark.parametrize("seed", range(10))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(10):
            n = rng.integers(0, 101)
            a = rng.standard_normal(n + 1)
            back = second_to_first(first_to_second(a))
            assert np.max(np.abs(back - a)) <= 1e-13 * np.max(np.abs(a))

    def test_conversion_preserves_values(self):
        rng = np.random.default_rng(3)
        c = rng.standard_normal(40)
        s = u_series(c)
        x = rng.uniform(-1, 1, 64)
        assert s.to_basis(Basis.FIRST)(x) == pytest.approx(s(x), abs=1e-11)


class TestInterpolation:
    def test_reproduces_u3(self):
        s = interpolate_on_grid(u_series([0, 0, 0, 1.0]), 3)
        assert s.coeffs == pytest.approx([0, 0, 0, 1.0], abs=1e-14)

    def test_constant(self):
        s = interpolate_on_grid(lambda x: np.ones_like(x), 2)
        assert s.coeffs == pytest.approx([1.0, 0, 0], abs=1e-14)

    def test_absx_degree2(self):
        # interpolation of |x| at {-sqrt2/2, 0, sqrt2/2} is sqrt(2) x^2,
        # i.e. U coefficients (sqrt2/4, 0, sqrt2/4)
        s = interpolate_on_grid(np.abs, 2)
        r2 = np.sqrt(2.0)
        assert s.coeffs == pytest.approx([r2 / 4, 0.0, r2 / 4], abs=1e-14)

    @pytest.mark.parametrize("seed", range(5))
    def test_polynomial_reproduction(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(0, 40))
        c = rng.standard_normal(n + 1)
        s = interpolate_on_grid(u_series(c), n)
        assert np.max(np.abs(s.coeffs - c)) <= 1e-13 * np.max(np.abs(c))

    def test_matches_values_on_grid(self):
        f = lambda x: np.exp(x) * np.sin(3 * x)
        n = 21
        s = interpolate_on_grid(f, n)
        g = build_grid(n)
        scale = np.max(np.abs(f(g.points)))
        assert np.max(np.abs(s(g.points) - f(g.points))) <= 1e-13 * scale


class TestDifferentiate:
    def test_t2(self):
        d = differentiate(t_series([0, 0, 1.0]))
        assert d.basis is Basis.SECOND
        assert d.coeffs == pytest.approx([0.0, 2.0])  # 4x = 2 U_1

    def test_constant(self):
        d = differentiate(u_series([3.0]))
        assert d.coeffs == pytest.approx([0.0])

    def test_t5_is_5_u4(self):
        d = differentiate(t_series([0, 0, 0, 0, 0, 1.0]))
        assert d.coeffs == pytest.approx([0, 0, 0, 0, 5.0], abs=1e-14)

    @pytest.mark.parametrize("seed", range(4))
    def test_finite_differences(self, seed):
        rng = np.random.default_rng(100 + seed)
        for _ in range(25):
            n = int(rng.integers(0, 51))
            basis = Basis.FIRST if rng.integers(2) else Basis.SECOND
            s = ChebSeries(basis, rng.standard_normal(n + 1))
            d = differentiate(s)
            # interior sample: the h^2 p''' truncation error of central
            # differences grows like (1-x^2)^(-3/2) toward the endpoints
            x = rng.uniform(-0.7, 0.7, 20)
            h = 1e-6
            fd = (s(x + h) - s(x - h)) / (2 * h)
            assert np.max(np.abs(d(x) - fd)) <= 1e-7 * max(s.coeff_max, 1.0)


class TestSegmentIntegral:
    def test_j0(self):
        assert integral_secondkind_segment(0, -1, 1) == pytest.approx(2.0, abs=1e-15)

    def test_j1_odd(self):
        assert integral_secondkind_segment(1, -1, 1) == pytest.approx(0.0, abs=1e-15)

    def test_j2_half(self):
        assert integral_secondkind_segment(2, 0, 1) == pytest.approx(1 / 3, rel=1e-14)

    def test_series_integrate_matches(self):
        rng = np.random.default_rng(5)
        c = rng.standard_normal(12)
        s = u_series(c)
        a, b = -0.3, 0.8
        expect = sum(ck * integral_secondkind_segment(k, a, b) for k, ck in enumerate(c))
        assert s.integrate(a, b) == pytest.approx(expect, rel=1e-13)
