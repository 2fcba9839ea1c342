"""Adaptive Chebyshev proxies for black-box evaluators on [-1, 1].

A proxy is a ChebSeries whose trailing-coefficient envelope sits below
tol * max|coeff|, found by doubling the degree until the last three
coefficients pass that test. With breakpoint hints (or with splitting
enabled) the result is a PiecewiseCheb, one series per subinterval;
subintervals that refuse to resolve are bisected down to a minimum width
and then kept as unresolved slivers whose contribution to any integral is
bounded by their width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .chebyshev import Basis, ChebSeries
from .errors import NoConvergence

__all__ = ["PiecewiseCheb", "Piece", "adaptive_proxy", "fit_on_interval"]

DEGREE_CAP = 2**16
SPLIT_PIECE_DEGREE = 128
MIN_PIECE_WIDTH = 1e-13
MAX_PIECES = 2**12


def _chebpts_first(m: int, a: float, b: float) -> np.ndarray:
    """m Chebyshev points of the first kind mapped to [a, b], descending in
    the canonical DCT ordering x_k = cos(pi (2k+1)/(2m))."""
    k = np.arange(m)
    t = np.cos(np.pi * (2 * k + 1) / (2 * m))
    return 0.5 * (a + b) + 0.5 * (b - a) * t


def _coeffs_from_values(vals: np.ndarray) -> np.ndarray:
    """First-kind coefficients of the interpolant at first-kind points."""
    m = len(vals)
    a = scipy.fft.dct(vals, type=2) / m
    a[0] /= 2.0
    return a


# Fixed off-grid checkpoints, used to reject aliased fits (e.g. T_50 sampled
# at 33 points looks like a clean low-degree series with a zero tail). The
# edge-hugging points catch features that sit between the outermost sample
# point and the interval edge.
_CHECKPOINTS = np.concatenate(
    [
        np.cos(np.pi * ((np.arange(1, 14) * 0.381966011250105) % 1.0)),
        [1 - 1e-3, 1 - 1e-6, 1 - 1e-9, 1 - 1e-12],
        [-1 + 1e-3, -1 + 1e-6, -1 + 1e-9, -1 + 1e-12],
    ]
)


def fit_on_interval(
    evaluator,
    a: float,
    b: float,
    tol: float,
    *,
    abs_floor: float = 0.0,
    max_degree: int = DEGREE_CAP,
    start_degree: int = 16,
    allow_plateau: bool = False,
    plateau_rel: float = 0.0,
):
    """Adaptively fit evaluator on [a, b].

    Returns (series, resolved). The series lives in local coordinates on
    [-1, 1]; callers map through x -> (2x - a - b)/(b - a). `resolved` is
    False only when the degree cap was hit, in which case the best fit so
    far is returned untrimmed.

    With allow_plateau=True, a coefficient tail that has stagnated at a tiny
    relative level by the degree cap is treated as the evaluator's rounding
    floor and accepted (needed near singular endpoints, where e.g. 1 - x*x
    loses digits and no amount of degree helps). plateau_rel > 0 additionally
    accepts a capped fit whose tail sits below plateau_rel * local max
    coefficient AND whose checkpoint values are stable against the
    half-degree fit (aliased unresolved oscillation also produces a smallish
    pseudo-random tail, but it cannot reproduce the same values at two
    sampling densities). The rootfinder uses this: a locally-resolved
    representation cannot hide a sign change, and roots are re-polished on
    the raw evaluator afterwards.
    """
    deg = min(start_degree, max_degree)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    check_x = mid + half * _CHECKPOINTS
    check_f = None

    def verified(full: ChebSeries, cut: float):
        nonlocal check_f
        if check_f is None:
            check_f = np.asarray(evaluator(check_x), dtype=float)
        return np.max(np.abs(full(_CHECKPOINTS) - check_f)) <= 50.0 * cut + 4.0 * abs_floor

    half_check = None
    while True:
        m = deg + 1
        pts = _chebpts_first(m, a, b)
        vals = np.asarray(evaluator(pts), dtype=float)
        coeffs = _coeffs_from_values(vals)
        cmax = float(np.max(np.abs(coeffs)))
        cut = max(tol * cmax, abs_floor)
        tail = float(np.max(np.abs(coeffs[-3:])))
        if cmax == 0.0 or tail <= cut:
            full = ChebSeries(Basis.FIRST, coeffs)
            if cmax == 0.0 or verified(full, cut):
                return full.trimmed(cut), True
        if plateau_rel > 0.0 and max_degree // 2 <= deg < max_degree:
            half_check = ChebSeries(Basis.FIRST, coeffs)(_CHECKPOINTS)
        if deg >= max_degree:
            accept = False
            if allow_plateau and m >= 32:
                # Flat-noise detection: white rounding noise has the same
                # median level in the last two coefficient quarters, while a
                # genuine algebraic tail (kinks ~ k^-2, jumps ~ k^-1) decays
                # across them by at least ~30%.
                hi = float(np.median(np.abs(coeffs[-(m // 4):])))
                lo = float(np.median(np.abs(coeffs[-(m // 2): -(m // 4)])))
                accept = hi >= 0.75 * lo and hi <= 1e-5 * cmax
            full = ChebSeries(Basis.FIRST, coeffs)
            if not accept and plateau_rel > 0.0 and half_check is not None:
                # resolved-at-noise acceptance: small relative tail plus
                # agreement with the half-degree fit at the checkpoints
                stable = float(np.max(np.abs(full(_CHECKPOINTS) - half_check)))
                accept = tail <= max(plateau_rel * cmax, 4.0 * abs_floor) and (
                    stable <= max(20.0 * tail, 8.0 * abs_floor)
                )
            if accept:
                plateau_cut = max(2.0 * tail, cut)
                if verified(full, plateau_cut):
                    return full.trimmed(plateau_cut), True
            return ChebSeries(Basis.FIRST, coeffs), False
        deg = min(2 * deg, max_degree)


@dataclass(frozen=True, eq=False)
class Piece:
    a: float
    b: float
    series: ChebSeries
    resolved: bool = True

    def local(self, x):
        return (2.0 * np.asarray(x, dtype=float) - self.a - self.b) / (self.b - self.a)

    def __call__(self, x):
        return self.series(self.local(x))

    def integrate(self, a: float, b: float) -> float:
        half = 0.5 * (self.b - self.a)
        return half * self.series.integrate(self.local(a), self.local(b))


class PiecewiseCheb:
    """A list of contiguous Chebyshev pieces covering [-1, 1] (or a part)."""

    def __init__(self, pieces):
        pieces = sorted(pieces, key=lambda p: p.a)
        if not pieces:
            raise ValueError("need at least one piece")
        self.pieces = pieces
        self._edges = np.array([p.a for p in pieces] + [pieces[-1].b])

    @property
    def a(self) -> float:
        return self.pieces[0].a

    @property
    def b(self) -> float:
        return self.pieces[-1].b

    @property
    def breaks(self) -> np.ndarray:
        return self._edges[1:-1]

    @property
    def resolved(self) -> bool:
        return all(p.resolved for p in self.pieces)

    @property
    def coeff_max(self) -> float:
        return max(p.series.coeff_max for p in self.pieces)

    def _locate(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._edges, x, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xf = np.atleast_1d(x).ravel()
        out = np.empty_like(xf)
        idx = self._locate(xf)
        for i in np.unique(idx):  # touch only the pieces actually hit
            mask = idx == i
            out[mask] = self.pieces[i](xf[mask])
        if scalar:
            return float(out[0])
        return out.reshape(np.atleast_1d(x).shape)

    def integrate(self, a: float, b: float) -> float:
        if b < a:
            return -self.integrate(b, a)
        total = 0.0
        for p in self.pieces:
            lo, hi = max(a, p.a), min(b, p.b)
            if hi > lo:
                total += p.integrate(lo, hi)
        return total

    def derivative(self) -> "PiecewiseCheb":
        out = []
        for p in self.pieces:
            d = p.series.derivative() * (2.0 / (p.b - p.a))
            out.append(Piece(p.a, p.b, d, p.resolved))
        return PiecewiseCheb(out)


def _split_fit(evaluator, a, b, tol, abs_floor, budget) -> list:
    series, ok = fit_on_interval(
        evaluator,
        a,
        b,
        tol,
        abs_floor=abs_floor,
        max_degree=SPLIT_PIECE_DEGREE,
        allow_plateau=True,
    )
    if ok:
        return [Piece(a, b, series, True)]
    if b - a <= MIN_PIECE_WIDTH:
        small, _ = fit_on_interval(
            evaluator, a, b, tol, abs_floor=abs_floor, max_degree=16
        )
        return [Piece(a, b, small, False)]
    if budget[0] <= 0:
        raise NoConvergence(
            f"piecewise fit used more than {MAX_PIECES} subintervals on [{a}, {b}]"
        )
    budget[0] -= 1
    mid = a + (b - a) * 0.5000539266278566  # slightly off-center: dodges
    left = _split_fit(evaluator, a, mid, tol, abs_floor, budget)  # symmetric kinks
    right = _split_fit(evaluator, mid, b, tol, abs_floor, budget)
    return left + right


def adaptive_proxy(
    evaluator,
    tol: float,
    *,
    breakpoints=(),
    split: bool = False,
    abs_floor: float = 0.0,
    max_degree: int = DEGREE_CAP,
):
    """Adaptive Chebyshev representation of evaluator on [-1, 1].

    Without breakpoints and without splitting, returns a single ChebSeries or
    raises NoConvergence at the degree cap. With breakpoints, fits one series
    per subinterval (a PiecewiseCheb). With split=True, subintervals that do
    not resolve by degree 128 are bisected recursively instead of raising.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must be in (0, 1)")
    bps = sorted(float(t) for t in breakpoints if -1.0 < t < 1.0)
    if not bps and not split:
        series, ok = fit_on_interval(
            evaluator, -1.0, 1.0, tol, abs_floor=abs_floor, max_degree=max_degree
        )
        if not ok:
            raise NoConvergence(
                f"no coefficient tail decay by degree {max_degree}"
            )
        return series
    edges = [-1.0] + bps + [1.0]
    pieces = []
    budget = [MAX_PIECES]
    for lo, hi in zip(edges[:-1], edges[1:]):
        if split:
            pieces.extend(_split_fit(evaluator, lo, hi, tol, abs_floor, budget))
        else:
            series, ok = fit_on_interval(
                evaluator, lo, hi, tol, abs_floor=abs_floor, max_degree=max_degree
            )
            if not ok:
                raise NoConvergence(
                    f"no coefficient tail decay by degree {max_degree} on [{lo}, {hi}]"
                )
            pieces.append(Piece(lo, hi, series, True))
    return PiecewiseCheb(pieces)
