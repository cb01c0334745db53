"""Minimal BFGS minimizer with central-difference gradients.

Used for the state-space likelihood, where analytic derivatives are not
available.  Backtracking (Armijo) line search guarantees the objective never
increases, so the returned point is always at least as good as the start.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["BfgsResult", "numerical_gradient", "minimize_bfgs"]


@dataclass
class BfgsResult:
    x: np.ndarray
    fun: float
    n_iter: int
    n_eval: int
    converged: bool
    message: str


def numerical_gradient(fun, x, rel_step=1e-5):
    """Central finite differences with a step relative to each coordinate."""
    x = np.asarray(x, dtype=np.float64)
    g = np.empty_like(x)
    for i in range(len(x)):
        h = rel_step * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return g


def minimize_bfgs(fun, x0, rel_step=1e-5, gtol=1e-5, ftol=1e-9, max_iter=200,
                  max_backtracks=40):
    """Minimize fun starting at x0; returns the best point found."""
    x = np.asarray(x0, dtype=np.float64).copy()
    n = len(x)
    f = float(fun(x))
    n_eval = 1
    if not np.isfinite(f):
        raise ValueError("objective not finite at the starting point")
    Hinv = np.eye(n)
    g = numerical_gradient(fun, x, rel_step)
    n_eval += 2 * n
    converged = False
    message = "max iterations reached"
    it = 0
    for it in range(1, max_iter + 1):
        if np.linalg.norm(g, np.inf) < gtol:
            converged = True
            message = "gradient tolerance reached"
            break
        p = -Hinv @ g
        slope = g @ p
        if slope >= 0:  # lost curvature information; restart from steepest descent
            Hinv = np.eye(n)
            p = -g
            slope = g @ p
        step = 1.0
        f_new = None
        for _ in range(max_backtracks):
            x_try = x + step * p
            f_try = float(fun(x_try))
            n_eval += 1
            if np.isfinite(f_try) and f_try <= f + 1e-4 * step * slope:
                f_new, x_new = f_try, x_try
                break
            step *= 0.5
        if f_new is None:
            message = "line search failed"
            break
        g_new = numerical_gradient(fun, x_new, rel_step)
        n_eval += 2 * n
        s = x_new - x
        yv = g_new - g
        sy = s @ yv
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(yv):
            rho = 1.0 / sy
            I = np.eye(n)
            V = I - rho * np.outer(s, yv)
            Hinv = V @ Hinv @ V.T + rho * np.outer(s, s)
        if abs(f - f_new) < ftol * max(1.0, abs(f)):
            x, f, g = x_new, f_new, g_new
            converged = True
            message = "objective change below tolerance"
            break
        x, f, g = x_new, f_new, g_new
    return BfgsResult(x=x, fun=f, n_iter=it, n_eval=n_eval,
                      converged=converged, message=message)
