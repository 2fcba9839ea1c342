"""Chebyshev grids and series: the polynomial currency of the package.

Everything lives on [-1, 1]. Series come in two flavors, first kind (T_j) and
second kind (U_j); the second kind is the primary internal representation
because its roots are the canonical L1 sample points and its antiderivative
is a single first-kind polynomial, integral U_j = T_{j+1}/(j+1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Basis",
    "ChebGrid",
    "ChebSeries",
    "build_grid",
    "chebvander_second",
    "differentiate",
    "first_to_second",
    "integral_secondkind_segment",
    "interpolate_on_grid",
    "second_to_first",
    "tcheb_values",
]


class Basis(enum.Enum):
    FIRST = "first"
    SECOND = "second"


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ChebGrid:
    """Roots of U_{N+1} with the weights w_j = pi*sqrt(1-x_j^2)/(N+2).

    Attributes:
        size: N; the grid has N+1 points.
        points: strictly increasing, symmetric about 0, all in (-1, 1).
        weights: positive, symmetric; sum w_j |f(x_j)| -> integral |f| as N grows.
        sines: sqrt(1 - x_j^2) = sin(theta_j), kept because it is exact where
            1 - x_j^2 would lose digits near the endpoints.
    """

    size: int
    points: np.ndarray
    weights: np.ndarray
    sines: np.ndarray

    def __len__(self) -> int:
        return self.size + 1

    @cached_property
    def thetas(self) -> np.ndarray:
        """Angles with x_j = cos(theta_j), decreasing from ~pi to ~0."""
        n = self.size
        j = np.arange(n + 1)
        return _frozen((n + 1 - j) * np.pi / (n + 2))


def build_grid(N: int) -> ChebGrid:
    """Grid of the N+1 roots of U_{N+1}, ascending, with quadrature weights."""
    if N < 0:
        raise ValueError("grid size N must be >= 0")
    j = np.arange(N + 1)
    # x_j = cos((N+1-j)pi/(N+2)) written through sin so that x_j = -x_{N-j}
    # holds exactly in floating point; the cosine gives sin(theta_j) exactly
    # symmetric as well.
    half = np.pi * (2 * j - N) / (2 * (N + 2))
    x = np.sin(half)
    s = np.cos(half)
    w = np.pi * s / (N + 2)
    return ChebGrid(size=N, points=_frozen(x), weights=_frozen(w), sines=_frozen(s))


def first_to_second(a: np.ndarray) -> np.ndarray:
    """Coefficients of sum a_j T_j re-expressed as sum c_j U_j.

    Uses T_0 = U_0, T_1 = U_1/2, T_j = (U_j - U_{j-2})/2.
    """
    a = np.asarray(a, dtype=float)
    n = len(a) - 1
    c = np.zeros(n + 1)
    pad = np.concatenate([a, [0.0, 0.0]])
    c[0] = a[0] - pad[2] / 2.0
    if n >= 1:
        k = np.arange(1, n + 1)
        c[1:] = (a[1:] - pad[k + 2]) / 2.0
    return c


def second_to_first(c: np.ndarray) -> np.ndarray:
    """Inverse of :func:`first_to_second`."""
    c = np.asarray(c, dtype=float)
    n = len(c) - 1
    a = np.zeros(n + 3)
    for k in range(n, 0, -1):
        a[k] = 2.0 * c[k] + a[k + 2]
    a[0] = c[0] + a[2] / 2.0
    return a[: n + 1]


def _clenshaw(coeffs: np.ndarray, basis: Basis, x):
    x = np.asarray(x, dtype=float)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for ck in coeffs[:0:-1]:
        b1, b2 = ck + 2.0 * x * b1 - b2, b1
    if basis is Basis.FIRST:
        return coeffs[0] + x * b1 - b2
    return coeffs[0] + 2.0 * x * b1 - b2


def tcheb_values(kmax: int, x) -> np.ndarray:
    """T_k(x) for k = 0..kmax as an array of shape (kmax+1,) + x.shape.

    Only valid for |x| <= 1 (uses the cosine form, which is exact there).
    """
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    theta = np.arccos(x)
    k = np.arange(kmax + 1).reshape((kmax + 1,) + (1,) * x.ndim)
    return np.cos(k * theta)


def chebvander_second(x, n: int) -> np.ndarray:
    """Vandermonde matrix V[i, j] = U_j(x_i) for j = 0..n."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    V = np.empty((x.size, n + 1))
    V[:, 0] = 1.0
    if n >= 1:
        V[:, 1] = 2.0 * x
    for j in range(2, n + 1):
        V[:, j] = 2.0 * x * V[:, j - 1] - V[:, j - 2]
    return V


@dataclass(frozen=True, eq=False)
class ChebSeries:
    """A finite Chebyshev series sum_j coeffs[j] * T_j (or U_j).

    Immutable; arithmetic returns new series. Trailing coefficients may be
    zero, so `degree` is the nominal length-1, and `trimmed_degree` drops the
    numerically zero tail.
    """

    basis: Basis
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(np.atleast_1d(self.coeffs)))
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("coeffs must be a nonempty 1-D array")

    # -- basics ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def coeff_max(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def trimmed(self, tol_abs: float = 0.0) -> "ChebSeries":
        """Drop trailing coefficients with |c_j| <= tol_abs."""
        c = self.coeffs
        keep = len(c)
        while keep > 1 and abs(c[keep - 1]) <= tol_abs:
            keep -= 1
        return ChebSeries(self.basis, c[:keep]) if keep < len(c) else self

    @property
    def trimmed_degree(self) -> int:
        return self.trimmed(0.0).degree

    def __call__(self, x):
        return _clenshaw(self.coeffs, self.basis, x)

    # -- conversions ----------------------------------------------------
    def to_basis(self, basis: Basis) -> "ChebSeries":
        if basis is self.basis:
            return self
        if basis is Basis.SECOND:
            return ChebSeries(Basis.SECOND, first_to_second(self.coeffs))
        return ChebSeries(Basis.FIRST, second_to_first(self.coeffs))

    # -- arithmetic -----------------------------------------------------
    def _coerced(self, other: "ChebSeries") -> np.ndarray:
        other = other.to_basis(self.basis)
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n)
        a[: len(self.coeffs)] = self.coeffs
        b = np.zeros(n)
        b[: len(other.coeffs)] = other.coeffs
        return a, b

    def __add__(self, other: "ChebSeries") -> "ChebSeries":
        a, b = self._coerced(other)
        return ChebSeries(self.basis, a + b)

    def __sub__(self, other: "ChebSeries") -> "ChebSeries":
        a, b = self._coerced(other)
        return ChebSeries(self.basis, a - b)

    def __mul__(self, scalar: float) -> "ChebSeries":
        return ChebSeries(self.basis, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "ChebSeries":
        return self * -1.0

    # -- calculus -------------------------------------------------------
    def derivative(self) -> "ChebSeries":
        return differentiate(self)

    def integrate(self, a: float = -1.0, b: float = 1.0) -> float:
        """Exact integral of the series over [a, b] within [-1, 1]."""
        c = self.to_basis(Basis.SECOND).coeffs
        n = len(c) - 1
        T = tcheb_values(n + 1, np.array([a, b]))
        k = np.arange(1, n + 2)
        anti = (T[1:, 1] - T[1:, 0]) / k
        return float(np.dot(c, anti))

    def __repr__(self) -> str:  # compact: long coefficient arrays are noise
        return f"ChebSeries({self.basis.value}, degree={self.degree})"


def interpolate_on_grid(f, n: int) -> ChebSeries:
    """Degree <= n interpolant of f at the n+1 roots of U_{n+1}.

    Computed from the discrete orthogonality
    sum_l U_i(x_l) U_j(x_l) (1 - x_l^2) = (n+2)/2 * delta_ij,
    so c_j = 2/(n+2) * sum_l sin(theta_l) sin((j+1) theta_l) f(x_l).
    Returns a second-kind series.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    grid = build_grid(n)
    evaluate = getattr(f, "eval", f)
    vals = np.asarray(evaluate(grid.points), dtype=float)
    if vals.shape != grid.points.shape:
        vals = np.array([float(evaluate(x)) for x in grid.points])
    theta = grid.thetas
    S = np.sin(np.outer(np.arange(1, n + 2), theta))
    c = (2.0 / (n + 2)) * (S @ (grid.sines * vals))
    return ChebSeries(Basis.SECOND, c)


def differentiate(series: ChebSeries) -> ChebSeries:
    """Exact derivative, returned in the second-kind basis.

    Route through the first kind and use T_k' = k U_{k-1}.
    """
    a = series.to_basis(Basis.FIRST).coeffs
    if len(a) == 1:
        return ChebSeries(Basis.SECOND, np.zeros(1))
    d = a[1:] * np.arange(1, len(a))
    return ChebSeries(Basis.SECOND, d)


def integral_secondkind_segment(j: int, a: float, b: float) -> float:
    """integral_a^b U_j(x) dx = (T_{j+1}(b) - T_{j+1}(a)) / (j+1), exactly."""
    if j < 0:
        raise ValueError("j must be >= 0")
    ta, tb = np.cos((j + 1) * np.arccos(np.clip([a, b], -1.0, 1.0)))
    return float((tb - ta) / (j + 1))
