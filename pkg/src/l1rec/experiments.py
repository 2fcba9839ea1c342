"""Reproducible experiment sweeps shared by the CLI bench command and tests.

Each function returns a plain dict of lists/floats, ready for JSON or CSV.
"""

from __future__ import annotations

import numpy as np

from .catalog import catalog_function
from .chebyshev import build_grid
from .funcrep import Residual, norm
from .localization import omega_measure
from .lp import WeightedL1Fit, solve
from .newton import best_l1, refine_mesh
from .recovery import recover_l1

__all__ = [
    "lp_convergence_experiment",
    "sqrt_bound_sweep",
    "omega_sweep",
    "abs_ratio_sweep",
    "legendre8_regimes",
    "loglog_slope",
]


def loglog_slope(ns, values) -> float:
    """Least-squares slope of log(values) against log(ns)."""
    return float(np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(values, float)), 1)[0])


def lp_convergence_experiment(sample_counts=(100, 316, 1000, 3162, 10000), n: int = 10):
    """Distance of the (un)refined LP solution to the converged Newton answer
    for exp(x) sin(10x), as the sample count grows."""
    f = catalog_function("expsin10")
    reference = best_l1(f, n)
    rows = []
    for N1 in sample_counts:
        N = N1 - 1
        grid = build_grid(N)
        plain = solve(WeightedL1Fit(grid.points, grid.weights, f.eval(grid.points), n)).coefficients
        err_plain = norm(plain - reference.polynomial, "L1")
        pts, wts = refine_mesh(Residual(f, plain).roots, N)
        refined = solve(WeightedL1Fit(pts, wts, f.eval(pts), n)).coefficients
        err_refined = norm(refined - reference.polynomial, "L1")
        rows.append({"samples": N1, "unrefined": err_plain, "refined": err_refined})
    counts = [r["samples"] for r in rows]
    return {
        "function": "expsin10",
        "degree": n,
        "rows": rows,
        "unrefined_slope": loglog_slope(counts, [r["unrefined"] for r in rows]),
        "refined_slope": loglog_slope(counts, [r["refined"] for r in rows]),
        "reference_path": reference.path.value,
        "reference_optimality": float(np.max(np.abs(reference.mu))),
    }


def sqrt_bound_sweep(degrees=tuple(range(2, 65, 2))):
    """Measured sqrt(1-x^2) best-L1 errors against the 64/(pi (n+1)^3) bound."""
    f = catalog_function("sqrt1mx2")
    rows = []
    for n in degrees:
        out = best_l1(f, n)
        rows.append(
            {
                "n": n,
                "l1_error": out.l1_error,
                "l1_upper": 64.0 / (np.pi * (n + 1) ** 3),
                "path": out.path.value,
            }
        )
    return {"function": "sqrt1mx2", "rows": rows}


def omega_sweep(name: str, degrees):
    """Omega_n measures over a degree sweep, with the fitted log-log slope."""
    f = catalog_function(name)
    rows = []
    for n in degrees:
        rep = omega_measure(f, n)
        rows.append(
            {
                "n": n,
                "omega_measure": rep.omega_measure,
                "omega_bound": rep.omega_bound,
                "l1_error": rep.l1_error,
                "linf_error": rep.linf_error,
                "path": rep.best_path,
            }
        )
    return {
        "function": name,
        "rows": rows,
        "slope": loglog_slope([r["n"] for r in rows], [r["omega_measure"] for r in rows]),
    }


def abs_ratio_sweep(degrees=(20, 40, 80, 160)):
    """Measured |x| best-L1 errors against the pi^2/(4n^2) asymptotic."""
    f = catalog_function("absx")
    rows = []
    for n in degrees:
        out = best_l1(f, n)
        asym = np.pi**2 / (4.0 * n * n)
        rows.append(
            {
                "n": n,
                "l1_error": out.l1_error,
                "asymptotic": asym,
                "ratio": out.l1_error / asym,
                "path": out.path.value,
            }
        )
    return {"function": "absx", "rows": rows}


def legendre8_regimes(degrees=(5, 7, 8, 10, 16, 24, 32, 40), N: int = 4999):
    """Recovery sup-distance to the clean Legendre P_8 across degrees."""
    f = catalog_function("legendre8_corrupted")
    clean = f.corruption.clean
    x = np.linspace(-1.0, 1.0, 4001)
    target = clean(x)
    scale = float(np.max(np.abs(target)))
    rows = []
    for n in degrees:
        rep = recover_l1(f, n, N=N)
        dist = float(np.max(np.abs(rep.recovered(x) - target)))
        rows.append(
            {
                "n": n,
                "sup_distance": dist,
                "recovered": bool(dist <= 1e-9 * scale),
                "detected_k": rep.k,
            }
        )
    return {"function": "legendre8_corrupted", "s": f.corruption.measure, "rows": rows}
