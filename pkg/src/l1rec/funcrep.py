"""Evaluable target functions, residuals against polynomials, and norms.

A FuncRep bundles a raw evaluator on [-1, 1] with an adaptive piecewise
Chebyshev proxy (used for derivatives and integrals), optional breakpoint
hints, and optional known-corruption metadata. A Residual is f minus a
polynomial; it owns the rootfinding/sign-partition machinery that the L1
norm, the optimality integrals, and the Newton iteration all share.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .chebyshev import Basis, ChebSeries, build_grid
from .proxy import PiecewiseCheb, Piece, adaptive_proxy, _chebpts_first, _coeffs_from_values
from .rootfind import roots_in_interval, sign_changing

__all__ = ["Corruption", "FuncRep", "Residual", "norm"]


def _vectorized(fn):
    """Wrap a scalar-or-vector callable so it always maps arrays to arrays."""
    probe = np.array([-0.5, 0.25])
    try:
        out = np.asarray(fn(probe), dtype=float)
        if out.shape == probe.shape:
            return lambda x: np.asarray(fn(np.asarray(x, dtype=float)), dtype=float)
    except Exception:
        pass
    return lambda x: np.array([float(fn(t)) for t in np.atleast_1d(x)])


@dataclass(frozen=True)
class Corruption:
    """Known corruption metadata: closed support intervals and the clean part."""

    intervals: tuple
    clean: object = None  # callable or ChebSeries for the uncorrupted f0

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        for (a, b) in ivs:
            if not (-1.0 <= a <= b <= 1.0):
                raise ValueError("corruption intervals must lie in [-1, 1]")
        for (_, b0), (a1, _) in zip(ivs[:-1], ivs[1:]):
            if a1 < b0:
                raise ValueError("corruption intervals must be disjoint")
        object.__setattr__(self, "intervals", ivs)

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    @property
    def zeta(self) -> float:
        return float(max(max(abs(a), abs(b)) for a, b in self.intervals))

    def contains(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        inside = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            inside |= (x >= a) & (x <= b)
        return inside


class FuncRep:
    """A function on [-1, 1] with proxy-based derivative and integral access."""

    def __init__(
        self,
        evaluator,
        *,
        breakpoints=(),
        proxy_tol: float = 1e-13,
        corruption: Corruption | None = None,
        name: str = "f",
    ):
        self.eval = _vectorized(evaluator)
        bps = sorted(float(t) for t in breakpoints if -1.0 < t < 1.0)
        if corruption is not None:
            for a, b in corruption.intervals:
                bps.extend(t for t in (a, b) if -1.0 < t < 1.0)
        self.breakpoints = tuple(sorted(set(bps)))
        self.proxy_tol = float(proxy_tol)
        self.corruption = corruption
        self.name = name

    @classmethod
    def from_series(cls, series: ChebSeries, name: str = "p") -> "FuncRep":
        f = cls(series, name=name, proxy_tol=1e-15)
        f.__dict__["proxy"] = PiecewiseCheb([Piece(-1.0, 1.0, series, True)])
        return f

    @cached_property
    def value_scale(self) -> float:
        x = np.cos(np.linspace(0.0, np.pi, 1025))
        extra = [t + d for t in self.breakpoints for d in (-1e-9, 0.0, 1e-9)]
        x = np.clip(np.concatenate([x, extra, [-1.0, 1.0]]), -1.0, 1.0)
        return max(float(np.max(np.abs(self.eval(x)))), 1e-300)

    @cached_property
    def proxy(self) -> PiecewiseCheb:
        prox = adaptive_proxy(
            self.eval,
            self.proxy_tol,
            breakpoints=self.breakpoints,
            split=True,
            abs_floor=4e-16 * self.value_scale,
        )
        if not isinstance(prox, PiecewiseCheb):
            prox = PiecewiseCheb([Piece(-1.0, 1.0, prox, True)])
        return prox

    @cached_property
    def _proxy_derivative(self) -> PiecewiseCheb:
        return self.proxy.derivative()

    def derivative(self, x):
        return self._proxy_derivative(x)

    def integrate(self, a: float, b: float) -> float:
        return self.proxy.integrate(a, b)

    @cached_property
    def l1_norm(self) -> float:
        """||f||_1, by signed integration between the sign changes of f."""
        return Residual(self, ChebSeries(Basis.SECOND, [0.0])).l1()

    def __call__(self, x):
        return self.eval(x)

    def __repr__(self) -> str:
        return f"FuncRep({self.name!r})"


class Residual:
    """e = f - p for a FuncRep f and polynomial p, with sign machinery."""

    def __init__(self, f: FuncRep, p: ChebSeries):
        self.f = f
        self.p = p
        self._dp = p.derivative()

    def __call__(self, x):
        return self.f.eval(x) - self.p(x)

    def derivative(self, x):
        return self.f.derivative(x) - self._dp(x)

    @cached_property
    def scale(self) -> float:
        x = np.cos(np.linspace(0.0, np.pi, 2049))
        extra = [t + d for t in self.f.breakpoints for d in (-1e-9, 0.0, 1e-9)]
        x = np.clip(np.concatenate([x, extra]), -1.0, 1.0)
        return float(np.max(np.abs(self(x))))

    @cached_property
    def eval_noise(self) -> float:
        """Rounding level of one evaluation of e = f - p: the Clenshaw error
        of a degree-d series grows like ~2 d eps max|c|."""
        eps = np.finfo(float).eps
        return eps * (self.f.value_scale + 2.0 * (self.p.degree + 1) * self.p.coeff_max)

    @property
    def negligible(self) -> bool:
        """True when e is numerically the zero function."""
        return self.scale <= max(
            1e-13 * max(self.f.value_scale, self.p.coeff_max), 4.0 * self.eval_noise
        )

    @cached_property
    def roots(self) -> np.ndarray:
        if self.negligible:
            return np.empty(0)
        return roots_in_interval(
            self,
            breakpoints=self.f.breakpoints,
            derivative=self.derivative,
            scale=self.scale,
            noise_floor=self.eval_noise,
        )

    @cached_property
    def _classified(self):
        changing, _ = sign_changing(self, self.roots)
        return changing

    @property
    def sign_change_roots(self) -> np.ndarray:
        return self.roots[self._classified]

    def sign_segments(self):
        """Boundaries [-1, r_1, ..., r_K, 1] at sign-changing roots, and the
        sign of e on each of the K+1 segments (sampled at midpoints)."""
        bounds = np.concatenate([[-1.0], self.sign_change_roots, [1.0]])
        mids = 0.5 * (bounds[:-1] + bounds[1:])
        signs = np.sign(self(mids))
        return bounds, signs

    def l1(self) -> float:
        """Exact ||e||_1 by signed integration between sign changes.

        The partition also splits at f's breakpoints so jump discontinuities
        cannot hide a sign flip inside a segment.
        """
        if self.negligible:
            return 0.0
        cuts = np.concatenate([self.sign_change_roots, self.f.breakpoints])
        bounds = np.unique(np.concatenate([[-1.0], cuts[(cuts > -1) & (cuts < 1)], [1.0]]))
        total = 0.0
        for a, b in zip(bounds[:-1], bounds[1:]):
            total += abs(self.f.integrate(a, b) - self.p.integrate(a, b))
        return total

    def linf(self) -> float:
        """||e||_inf from derivative roots, endpoints, and breakpoints."""
        cand = [np.array([-1.0, 1.0]), np.asarray(self.f.breakpoints)]
        if not self.negligible:
            cand.append(
                roots_in_interval(
                    self.derivative,
                    breakpoints=self.f.breakpoints,
                    scale=None,
                )
            )
        pts = np.concatenate([c for c in cand if c.size])
        return float(np.max(np.abs(self(pts))))


def _series_l1(series: ChebSeries) -> float:
    rts = roots_in_interval(series)
    bounds = np.concatenate([[-1.0], rts, [1.0]])
    return float(sum(abs(series.integrate(a, b)) for a, b in zip(bounds[:-1], bounds[1:])))


def _series_linf(series: ChebSeries) -> float:
    pts = np.concatenate([[-1.0, 1.0], roots_in_interval(series.derivative())])
    return float(np.max(np.abs(series(pts))))


def _series_l2(series: ChebSeries) -> float:
    a = series.to_basis(Basis.FIRST).coeffs
    sq = np.polynomial.chebyshev.chebmul(a, a)
    return float(np.sqrt(max(ChebSeries(Basis.FIRST, sq).integrate(-1.0, 1.0), 0.0)))


def norm(obj, which: str, *, N: int | None = None, tol: float | None = None) -> float:
    """Continuous and discrete norms: "L1", "L2", "Linf", "l1", "l0".

    The discrete norms ("l1", "l0") require the grid size N; "l0" counts grid
    samples with |f(x_j)| > tol. obj may be a ChebSeries, FuncRep, or Residual.
    """
    if which in ("l1", "l0"):
        if N is None:
            raise ValueError("discrete norms need the grid size N")
        grid = build_grid(N)
        evaluate = obj if callable(obj) and not isinstance(obj, FuncRep) else obj.eval
        if isinstance(obj, (ChebSeries, Residual)):
            evaluate = obj
        vals = np.abs(np.asarray(evaluate(grid.points), dtype=float))
        if which == "l1":
            return float(np.dot(grid.weights, vals))
        if tol is None:
            raise ValueError('norm(..., "l0") needs tol')
        return int(np.count_nonzero(vals > tol))

    if isinstance(obj, ChebSeries):
        if which == "L1":
            return _series_l1(obj)
        if which == "Linf":
            return _series_linf(obj)
        if which == "L2":
            return _series_l2(obj)
    else:
        res = obj if isinstance(obj, Residual) else Residual(obj, ChebSeries(Basis.SECOND, [0.0]))
        if which == "L1":
            return res.l1()
        if which == "Linf":
            return res.linf()
        if which == "L2":
            total = 0.0
            for piece in res.f.proxy.pieces:
                mid, half = 0.5 * (piece.a + piece.b), 0.5 * (piece.b - piece.a)
                m = max(piece.series.degree, res.p.degree) + 1
                pts = _chebpts_first(m, -1.0, 1.0)
                vals = piece.series(pts) - res.p(mid + half * pts)
                a1 = _coeffs_from_values(vals)
                sq = np.polynomial.chebyshev.chebmul(a1, a1)
                total += half * ChebSeries(Basis.FIRST, sq).integrate()
            return float(np.sqrt(max(total, 0.0)))
    raise ValueError(f"unknown norm {which!r}")
