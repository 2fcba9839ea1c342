"""Best L1 polynomial approximation on [-1, 1].

Pipeline: try the grid interpolant (optimal exactly when its residual
changes sign at all the interpolation nodes); otherwise solve a large
weighted-l1 LP for an initial guess, exit early if the samples reveal a
corrupted polynomial, refine the LP mesh around the residual roots, and
finish with Newton's method on the sign-integral optimality system

    mu_j(c) = integral sign(f - sum c_t U_t) U_j = 0,  j = 0..n.

mu is minus the gradient of c -> ||f - p_c||_1, whose Hessian at a residual
with simple sign-changing roots r_i is the PSD matrix
2 V^T diag(1/|e'(r_i)|) V; the Newton update is c <- c + H^{-1} mu with
safeguards (H = I on vanishing e', Tikhonov on ill-conditioning, and
objective-based step halving).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .chebyshev import (
    Basis,
    ChebSeries,
    build_grid,
    chebvander_second,
    interpolate_on_grid,
    tcheb_values,
)
from .errors import StepFailure
from .funcrep import FuncRep, Residual
from .lp import WeightedL1Fit, solve
from .recovery import default_grid_size, recover_l1

__all__ = [
    "Path",
    "NewtonState",
    "BestL1Result",
    "trial_interpolant",
    "lp_initialize",
    "refine_mesh",
    "compute_mu",
    "make_state",
    "newton_step",
    "near_best_factor",
    "best_l1",
]

EPRIME_TINY = 1e-13
COND_LIMIT = 1e14
MAX_HALVINGS = 30


class Path(enum.Enum):
    INTERPOLANT_SHORTCUT = "interpolant_shortcut"
    CORRUPTED_POLYNOMIAL = "corrupted_polynomial"
    NEWTON_CONVERGED = "newton_converged"
    NEWTON_STALLED = "newton_stalled"


def _mu_from_segments(bounds: np.ndarray, signs: np.ndarray, n: int) -> np.ndarray:
    """mu_j = sum_seg sign * (T_{j+1}(b) - T_{j+1}(a)) / (j+1), exactly."""
    T = tcheb_values(n + 1, bounds)  # (n+2, K+2)
    k = np.arange(1, n + 2)
    anti = (T[1:, 1:] - T[1:, :-1]) / k[:, None]
    return anti @ signs


def compute_mu(c: ChebSeries, f: FuncRep, n: int | None = None) -> np.ndarray:
    """Optimality integrals of the residual f - c for U_0..U_n."""
    n = c.degree if n is None else n
    res = Residual(f, c.to_basis(Basis.SECOND))
    bounds, signs = res.sign_segments()
    return _mu_from_segments(bounds, signs, n)


def near_best_factor(mu: np.ndarray, n: int) -> float | None:
    """1 / (1 - (2/pi)(n+2)^2 max|mu|) when the bound bites, else None."""
    load = (2.0 / np.pi) * (n + 2) ** 2 * float(np.max(np.abs(mu)))
    if load >= 1.0:
        return None
    return 1.0 / (1.0 - load)


@dataclass(frozen=True, eq=False)
class NewtonState:
    k: int
    coeffs: ChebSeries
    roots: np.ndarray  # sign-changing roots of the residual
    all_roots: np.ndarray
    signs: np.ndarray  # one sign per segment between sign-changing roots
    eprime: np.ndarray  # residual derivative at the sign-changing roots
    mu: np.ndarray
    objective: float
    optimality: float
    mu_noise: float
    halvings: int = 0
    used_identity: bool = False
    regularized: bool = False
    J: np.ndarray | None = field(default=None, repr=False)


def make_state(f: FuncRep, c: ChebSeries, n: int | None = None, k: int = 0, **flags) -> NewtonState:
    n = c.degree if n is None else n
    c = c.to_basis(Basis.SECOND)
    res = Residual(f, c)
    bounds, signs = res.sign_segments()
    roots = res.sign_change_roots
    mu = _mu_from_segments(bounds, signs, n)
    eprime = res.derivative(roots) if roots.size else np.empty(0)
    # attainable-accuracy estimate: each root carries ~eps*scale/|e'| of
    # location noise, and dmu_j/dr = 2 U_j(r)
    if roots.size:
        Umax = np.max(np.abs(chebvander_second(roots, n)), axis=1)
        dr = np.finfo(float).eps * f.value_scale / np.maximum(np.abs(eprime), 1e-300)
        noise = float(np.sum(2.0 * Umax * np.minimum(dr, 1.0)))
    else:
        noise = 0.0
    return NewtonState(
        k=k,
        coeffs=c,
        roots=roots,
        all_roots=res.roots,
        signs=signs,
        eprime=eprime,
        mu=mu,
        objective=res.l1(),
        optimality=float(np.max(np.abs(mu))),
        mu_noise=noise,
        **flags,
    )


def _gap_signs(res: Residual, nodes: np.ndarray):
    """Residual sign in each gap between consecutive nodes (and the two end
    gaps against +-1), or None when the pattern cannot be certified.

    The residual vanishes at the nodes by construction, so the candidate
    crossings are known: each gap is sampled at 8 Chebyshev-distributed
    points, samples below twice the evaluation-noise bound are discarded
    (their sign is not meaningful), and a certificate requires every usable
    sample in a gap to agree. No rootfinding is involved, which keeps the
    test reliable when the residual amplitude approaches the noise floor.
    """
    bounds = np.concatenate([[-1.0], nodes, [1.0]])
    local = np.cos(np.pi * (2 * np.arange(8) + 1) / 16.0)
    lo, hi = bounds[:-1], bounds[1:]
    pts = lo[:, None] + 0.5 * (hi - lo)[:, None] * (local[None, :] + 1.0)
    vals = res(pts.ravel()).reshape(pts.shape)
    usable = np.abs(vals) > 2.0 * res.eval_noise
    if not np.all(usable.any(axis=1)):
        return None
    signs = np.empty(len(lo))
    for i in range(len(lo)):
        v = vals[i, usable[i]]
        if not (np.all(v > 0) or np.all(v < 0)):
            return None  # an uncertified crossing inside the gap
        signs[i] = np.sign(v[0])
    return bounds, signs


def _certified_interpolant(f: FuncRep, n: int):
    """(polynomial, gap bounds, gap signs) when a grid interpolant is
    certified optimal by its sign pattern, else None.

    Phase 1: the n+1-node interpolant is optimal iff its residual changes
    sign at every node and nowhere else. Phase 2 (symmetric cases): when the
    n+2-node interpolant happens to have degree <= n, the same test against
    the n+2 nodes certifies it, since sign(e) = +-sign(U_{n+2}) makes
    sign(e) orthogonal to P_{n+1}, a superset of P_n.
    """
    p = interpolate_on_grid(f.eval, n)
    res = Residual(f, p)
    if res.negligible:
        return None  # f is already a degree <= n polynomial: LP path returns it
    out = _gap_signs(res, build_grid(n).points)
    if out is not None and _alternating(out[1]):
        return p, out[0], out[1]
    q = interpolate_on_grid(f.eval, n + 1)
    if abs(q.coeffs[n + 1]) <= 1e-12 * q.coeff_max:
        q2 = ChebSeries(Basis.SECOND, q.coeffs[: n + 1])
        res2 = Residual(f, q2)
        if not res2.negligible:
            out = _gap_signs(res2, build_grid(n + 1).points)
            if out is not None and _alternating(out[1]):
                return q2, out[0], out[1]
    return None


def _alternating(signs: np.ndarray) -> bool:
    return bool(np.all(signs[:-1] * signs[1:] < 0))


def trial_interpolant(f: FuncRep, n: int) -> ChebSeries | None:
    """Grid interpolant, returned iff certified optimal by its sign pattern."""
    out = _certified_interpolant(f, n)
    return None if out is None else out[0]


def lp_initialize(f: FuncRep, n: int, N: int | None = None) -> ChebSeries:
    """Weighted l1 fit on the size-N grid, N+1 = max(1000 + 50n, 5000)."""
    N = default_grid_size(n) if N is None else N
    grid = build_grid(N)
    prob = WeightedL1Fit(grid.points, grid.weights, f.eval(grid.points), n)
    return solve(prob).coefficients


def refine_mesh(roots, N: int):
    """Midpoint mesh refined around the roots: ~N/2 points across the union
    of [r_i - 4/N, r_i + 4/N] and ~N/2 points on the complement; weights are
    the midpoint-rule cell widths (summing to 2)."""
    delta = 4.0 / N
    merged = []
    for r in sorted(float(r) for r in roots):
        lo, hi = max(r - delta, -1.0), min(r + delta, 1.0)
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        elif hi > lo:
            merged.append((lo, hi))
    complement = []
    prev = -1.0
    for lo, hi in merged:
        if lo > prev:
            complement.append((prev, lo))
        prev = hi
    if prev < 1.0:
        complement.append((prev, 1.0))

    def fill(intervals, budget):
        pts, wts = [], []
        total = sum(hi - lo for lo, hi in intervals)
        if not intervals or total == 0.0 or budget <= 0:
            return pts, wts
        for lo, hi in intervals:
            m = max(1, int(round(budget * (hi - lo) / total)))
            h = (hi - lo) / m
            pts.extend(lo + (np.arange(m) + 0.5) * h)
            wts.extend([h] * m)
        return pts, wts

    if merged:
        p1, w1 = fill(merged, N // 2)
        p2, w2 = fill(complement, N - len(p1))
    else:
        p1, w1 = [], []
        p2, w2 = fill(complement, N)
    pts = np.array(p1 + p2)
    wts = np.array(w1 + w2)
    order = np.argsort(pts)
    return pts[order], wts[order]


def newton_step(state: NewtonState, f: FuncRep, objective_slack: float | None = None) -> NewtonState:
    """One safeguarded Newton step on the optimality system."""
    n = state.coeffs.degree
    scale = max(f.value_scale, state.coeffs.coeff_max)
    used_identity = regularized = False
    if state.roots.size == 0 or np.any(np.abs(state.eprime) < EPRIME_TINY * scale):
        H = np.eye(n + 1)
        used_identity = True
    else:
        V = chebvander_second(state.roots, n)
        H = 2.0 * (V.T * (1.0 / np.abs(state.eprime))) @ V
        if np.linalg.cond(H) > COND_LIMIT:
            H = H + (1e-10 * np.linalg.norm(H, 2)) * np.eye(n + 1)
            regularized = True
    delta = np.linalg.solve(H, state.mu)
    if objective_slack is None:
        objective_slack = 1e-14 * f.l1_norm
    step = 1.0
    for halving in range(MAX_HALVINGS + 1):
        cand = ChebSeries(Basis.SECOND, state.coeffs.coeffs + step * delta)
        new = make_state(
            f,
            cand,
            n=n,
            k=state.k + 1,
            halvings=halving,
            used_identity=used_identity,
            regularized=regularized,
            J=H,
        )
        if new.objective <= state.objective + objective_slack:
            return new
        step *= 0.5
    raise StepFailure(f"no acceptable step after {MAX_HALVINGS} halvings")


@dataclass(frozen=True, eq=False)
class BestL1Result:
    polynomial: ChebSeries
    path: Path
    trace: list  # (iteration, objective, optimality-or-None)
    near_best_factor: float | None
    l1_error: float
    mu: np.ndarray | None
    stopping_tol: float | None = None
    relaxed: bool = False
    report: object = None  # RecoveryReport on the corrupted-polynomial path


def best_l1(
    f: FuncRep,
    n: int,
    *,
    tol: float = 1e-14,
    max_iter: int = 50,
    force_newton: bool = False,
    refine: bool = True,
    N: int | None = None,
) -> BestL1Result:
    """Full best-L1 driver; see the module docstring for the pipeline."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    if not force_newton:
        certified = _certified_interpolant(f, n)
        if certified is not None:
            p, bounds, signs = certified
            mu = _mu_from_segments(bounds, signs, n)
            objective = float(
                sum(
                    abs(f.integrate(a, b) - p.integrate(a, b))
                    for a, b in zip(bounds[:-1], bounds[1:])
                )
            )
            return BestL1Result(
                polynomial=p,
                path=Path.INTERPOLANT_SHORTCUT,
                trace=[(0, objective, float(np.max(np.abs(mu))))],
                near_best_factor=near_best_factor(mu, n),
                l1_error=objective,
                mu=mu,
            )

    N = default_grid_size(n) if N is None else N
    rep = recover_l1(f, n, N=N)
    if rep.exact and not force_newton:
        err = Residual(f, rep.recovered).l1()
        return BestL1Result(
            polynomial=rep.recovered,
            path=Path.CORRUPTED_POLYNOMIAL,
            trace=[(0, err, None)],
            near_best_factor=None,
            l1_error=err,
            mu=None,
            report=rep,
        )
    p0 = rep.recovered

    if refine:
        roots0 = Residual(f, p0).roots
        pts, wts = refine_mesh(roots0, N)
        prob = WeightedL1Fit(pts, wts, f.eval(pts), n)
        p0 = solve(prob).coefficients

    f_l1 = f.l1_norm
    state = make_state(f, p0, n=n)
    # stopping tolerance: the requested tol, relaxed by the proxy tolerance
    # when the representation of f is itself limited, and by the estimated
    # attainable mu accuracy (root-location noise)
    proxy_term = 10.0 * f.proxy_tol * f_l1 if not f.proxy.resolved else 0.0
    tol_abs = max(tol * f_l1, proxy_term, 4.0 * state.mu_noise)
    slack = 1e-14 * f_l1
    trace = [(0, state.objective, state.optimality)]
    while state.optimality >= tol_abs and state.k < max_iter:
        state = newton_step(state, f, objective_slack=slack)
        trace.append((state.k, state.objective, state.optimality))
        tol_abs = max(tol_abs, 4.0 * state.mu_noise)
    converged = state.optimality < tol_abs
    relaxed = tol_abs > tol * f_l1 * (1.0 + 1e-12)
    return BestL1Result(
        polynomial=state.coeffs,
        path=Path.NEWTON_CONVERGED if converged else Path.NEWTON_STALLED,
        trace=trace,
        near_best_factor=near_best_factor(state.mu, n),
        l1_error=state.objective,
        mu=state.mu,
        stopping_tol=tol_abs,
        relaxed=relaxed,
    )
