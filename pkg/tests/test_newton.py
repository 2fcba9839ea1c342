"""The best-L1 pipeline: trials, LP init, mesh refinement, Newton iteration."""

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize

from l1rec.chebyshev import Basis, ChebSeries
from l1rec.funcrep import FuncRep, Residual
from l1rec.newton import (
    Path,
    best_l1,
    compute_mu,
    lp_initialize,
    make_state,
    near_best_factor,
    newton_step,
    refine_mesh,
    trial_interpolant,
)


def u_series(c):
    return ChebSeries(Basis.SECOND, c)


def t_basis(deg):
    c = np.zeros(deg + 1)
    c[deg] = 1.0
    return ChebSeries(Basis.FIRST, c)


def absx():
    return FuncRep(np.abs, breakpoints=[0.0], name="absx")


def quad_l1(f, p, points=()):
    fn = lambda x: abs(f(x) - p(np.array([x]))[0])
    val, _ = quad(fn, -1, 1, points=sorted(set([0.0, *points])), limit=300)
    return val


class TestTrialInterpolant:
    @pytest.mark.parametrize("n", [1, 2, 5, 10])
    def test_t_nplus1(self, n):
        f = FuncRep(t_basis(n + 1), name="T")
        p = trial_interpolant(f, n)
        assert p is not None
        # T_{n+1} = (U_{n+1} - U_{n-1})/2, so the interpolant is -U_{n-1}/2
        expect = np.zeros(n + 1)
        expect[n - 1] = -0.5
        assert p.coeffs == pytest.approx(expect, abs=1e-13)

    def test_polynomial_returns_none(self):
        f = FuncRep(u_series([0.3, 0.2, 1.0]), name="p")
        assert trial_interpolant(f, 4) is None

    def test_sqrt_even_degree(self):
        f = FuncRep(lambda x: np.sqrt(np.maximum(0.0, 1 - x * x)), name="sqrt")
        p = trial_interpolant(f, 4)
        assert p is not None
        assert p.degree <= 4
        # certified optimal: all optimality integrals vanish
        assert np.max(np.abs(compute_mu(p, f, 4))) < 1e-10

    def test_sqrt_odd_degree(self):
        f = FuncRep(lambda x: np.sqrt(np.maximum(0.0, 1 - x * x)), name="sqrt")
        p = trial_interpolant(f, 5)
        assert p is not None
        assert np.max(np.abs(compute_mu(p, f, 5))) < 1e-10

    def test_absx_quadratic_true_optimum(self):
        # |x| with n=2: the 3-node interpolant sqrt(2)x^2 only touches zero at
        # x=0, so it is not optimal; the certified optimum interpolates at the
        # four U_4 roots: p* = sqrt(5)/10 + (2/sqrt(5)) x^2
        f = absx()
        p = trial_interpolant(f, 2)
        assert p is not None
        expect = [1.0 / np.sqrt(5.0), 0.0, np.sqrt(5.0) / 10.0]
        assert p.coeffs == pytest.approx(expect, abs=1e-12)


class TestLpInitialize:
    def test_polynomial_exact(self):
        c = np.array([0.2, -0.5, 0.0, 1.4])
        f = FuncRep(u_series(c), name="p")
        p = lp_initialize(f, 3, N=500)
        assert p.coeffs == pytest.approx(c, abs=1e-10)

    def test_absx_close_to_optimum(self):
        f = absx()
        p = lp_initialize(f, 2)
        expect = np.array([1.0 / np.sqrt(5.0), 0.0, np.sqrt(5.0) / 10.0])
        assert np.max(np.abs(p.coeffs - expect)) < 1e-3


class TestRefineMesh:
    def test_no_roots_uniform(self):
        pts, wts = refine_mesh([], 100)
        assert len(pts) == 100
        assert wts == pytest.approx(np.full(100, 0.02))
        assert np.sum(wts) == pytest.approx(2.0, abs=1e-12)

    def test_single_root(self):
        pts, wts = refine_mesh([0.0], 100)
        inside = np.abs(pts) <= 0.04
        assert abs(np.count_nonzero(inside) - 50) <= 2
        assert wts[inside][0] == pytest.approx(1.6e-3, rel=1e-12)
        assert np.sum(wts) == pytest.approx(2.0, abs=1e-12)

    def test_overlapping_roots_merge(self):
        pts, wts = refine_mesh([0.0, 0.01, 0.95], 200)
        assert np.sum(wts) == pytest.approx(2.0, abs=1e-12)
        assert np.all(np.diff(pts) > 0)

    def test_weights_match_cells(self):
        pts, wts = refine_mesh([-0.5, 0.3], 150)
        assert np.sum(wts) == pytest.approx(2.0, abs=1e-12)


class TestComputeMu:
    def test_odd_identity(self):
        # f(x) = x, c = 0: mu_0 = int sign(x) dx = 0
        f = FuncRep(lambda x: np.asarray(x, float), name="x")
        mu = compute_mu(u_series([0.0]), f, 0)
        assert mu == pytest.approx([0.0], abs=1e-13)

    def test_matches_adaptive_quadrature(self):
        f = FuncRep(lambda x: np.exp(x) * np.sin(3 * x), name="es")
        c = u_series([0.1, 0.4, -0.2])
        res = Residual(f, c)
        mu = compute_mu(c, f, 2)
        for j, uj in enumerate(
            [lambda x: 1.0, lambda x: 2 * x, lambda x: 4 * x * x - 1.0]
        ):
            val, _ = quad(
                lambda x: np.sign(res(np.array([x]))[0]) * uj(x),
                -1,
                1,
                points=list(res.sign_change_roots),
                limit=200,
            )
            assert mu[j] == pytest.approx(val, abs=1e-10)

    def test_zero_at_optimum(self):
        f = absx()
        p = trial_interpolant(f, 2)
        assert np.max(np.abs(compute_mu(p, f, 2))) < 1e-12


class TestNewtonStep:
    def test_fixed_point_at_optimum(self):
        f = absx()
        p = trial_interpolant(f, 2)
        state = make_state(f, p, n=2)
        new = newton_step(state, f)
        assert np.max(np.abs(new.coeffs.coeffs - p.coeffs)) < 1e-10

    def test_quadratic_optimality_decrease(self):
        f = absx()
        p = lp_initialize(f, 2)
        state = make_state(f, p, n=2)
        opts = [state.optimality]
        for _ in range(6):
            state = newton_step(state, f)
            opts.append(state.optimality)
            if state.optimality < 1e-13:
                break
        # once inside the basin, o_{k+1} <= C o_k^2
        seen = False
        for a, b in zip(opts[:-1], opts[1:]):
            if 1e-10 < a < 1e-3:
                assert b <= max(100.0 * a * a, 5e-14)
                seen = True
        assert seen
        assert opts[-1] < 1e-12

    def test_identity_fallback_on_flat_root(self):
        # f touching zero at a root of the residual: e'(r) = 0 triggers H = I
        f = FuncRep(lambda x: np.asarray(x, float) ** 2, name="x2")
        state = make_state(f, u_series([0.0]), n=0)
        assert state.roots.size == 0  # x^2 >= 0: no sign change
        new = newton_step(state, f)
        assert new.used_identity
        assert new.objective <= state.objective + 1e-12

    def test_identity_fallback_on_injected_flat_root(self):
        # synthetically zero out one residual slope: the H = I guard must
        # engage and the (halved) step must not increase the objective
        import dataclasses

        f = absx()
        state = make_state(f, lp_initialize(f, 2), n=2)
        assert state.roots.size >= 2
        flattened = state.eprime.copy()
        flattened[0] = 0.0
        state = dataclasses.replace(state, eprime=flattened)
        new = newton_step(state, f)
        assert new.used_identity
        assert new.objective <= state.objective + 1e-12 * f.l1_norm


class TestNearBestFactor:
    def test_zero_mu(self):
        assert near_best_factor(np.zeros(3), 2) == pytest.approx(1.0)

    def test_half_load(self):
        assert near_best_factor(np.array([np.pi / 16]), 0) == pytest.approx(2.0)

    def test_vacuous(self):
        assert near_best_factor(np.array([np.pi / 50]), 3) is None


class TestBestL1:
    def test_t6_shortcut(self):
        f = FuncRep(t_basis(6), name="T6")
        out = best_l1(f, 5)
        assert out.path is Path.INTERPOLANT_SHORTCUT
        expect = np.zeros(6)
        expect[4] = -0.5
        assert out.polynomial.coeffs == pytest.approx(expect, abs=1e-13)
        assert np.max(np.abs(out.mu)) < 1e-12

    def test_absx_n2(self):
        # independent oracle: brute-force minimization over even quadratics
        fn = lambda ab: quad(
            lambda x: abs(abs(x) - ab[0] - ab[1] * x * x), -1, 1, points=[0], limit=200
        )[0]
        brute = minimize(fn, x0=[0.2, 0.9], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
        f = absx()
        out = best_l1(f, 2)
        assert out.l1_error == pytest.approx(brute.fun, abs=1e-8)
        assert out.l1_error == pytest.approx((np.sqrt(5.0) - 2.0) / 2.0, abs=1e-11)
        p = out.polynomial
        # Nelder-Mead lands within ~1e-5 of the optimum on this flat objective
        assert p(np.array([0.0]))[0] == pytest.approx(brute.x[0], abs=2e-5)

    def test_corrupted_polynomial_path(self):
        p = u_series([0.7, -0.2, 0.5, 0.0, 1.0])
        from l1rec.funcrep import Corruption

        corr = Corruption(intervals=((0.2, 0.23),), clean=p)

        def f(x):
            x = np.asarray(x, float)
            return p(x) + np.where(corr.contains(x), 4.0, 0.0)

        out = best_l1(FuncRep(f, corruption=corr, name="cp"), 4)
        assert out.path is Path.CORRUPTED_POLYNOMIAL
        assert np.max(np.abs(out.polynomial.coeffs - p.coeffs)) < 1e-10
        assert out.near_best_factor is None

    def test_exact_polynomial_short_path(self):
        p = u_series([0.1, 0.2, 0.3])
        out = best_l1(FuncRep(p, name="poly"), 4)
        assert out.path is Path.CORRUPTED_POLYNOMIAL
        assert out.report.k == 0
        pad = np.zeros(5)
        pad[:3] = [0.1, 0.2, 0.3]
        assert out.polynomial.coeffs == pytest.approx(pad, abs=1e-10)

    def test_newton_path_smooth(self):
        f = FuncRep(lambda x: np.exp(x) * np.sin(10 * x), name="es10")
        out = best_l1(f, 10)
        assert out.path is Path.NEWTON_CONVERGED
        assert np.max(np.abs(out.mu)) < out.stopping_tol
        # trace objectives non-increasing up to the halving slack
        objs = [t[1] for t in out.trace]
        slack = 2e-14 * f.l1_norm
        assert all(b <= a + slack for a, b in zip(objs[:-1], objs[1:]))

    def test_path_consistency_forced_newton(self):
        f = FuncRep(lambda x: np.sqrt(np.maximum(0.0, 1 - x * x)), name="sqrt")
        short = best_l1(f, 4)
        forced = best_l1(f, 4, force_newton=True)
        assert short.path is Path.INTERPOLANT_SHORTCUT
        assert forced.path is Path.NEWTON_CONVERGED
        diff = short.polynomial - forced.polynomial
        from l1rec.funcrep import norm

        assert norm(diff, "L1") < 1e-10

    @pytest.mark.parametrize("n", [9, 24, 40])
    def test_near_best_certificate_absx14(self, n):
        # every trace iterate with a defined factor bounds its objective
        # against the final error
        f = FuncRep(lambda x: np.abs(np.asarray(x, float) - 0.25), breakpoints=[0.25])
        out = best_l1(f, n)
        assert out.path is Path.NEWTON_CONVERGED
        for _, objective, optimality in out.trace:
            factor = near_best_factor(np.array([optimality]), n)
            if factor is not None:
                assert objective <= factor * out.l1_error + 1e-12

    def test_perturbation_optimality(self):
        f = absx()
        out = best_l1(f, 3)
        base = out.l1_error
        for j in range(4):
            for s in (+1.0, -1.0):
                c = out.polynomial.coeffs.copy()
                c[j] += s * 1e-6
                pert = quad_l1(f.eval, u_series(c), points=out.polynomial.coeffs[:1])
                assert pert >= base - 1e-12
