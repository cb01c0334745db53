"""Nelson-Siegel / Diebold-Li factor extraction from a daily yield panel.

Maturities are in months, yields in percent per annum, and the decay rate
lambda is per month (0.0609 puts the curvature-loading peak at 30 months).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "YieldPanel",
    "NsLoadings",
    "FactorSeries",
    "Var1Fit",
    "ns_loadings",
    "fit_cross_section",
    "two_step",
    "empirical_proxies",
]

DEFAULT_LAMBDA = 0.0609


@dataclass(frozen=True)
class YieldPanel:
    dates: tuple          # ISO date strings, strictly increasing
    maturities: np.ndarray  # months, strictly increasing
    yields: np.ndarray      # (T, N) percent per annum

    def __post_init__(self):
        y = self.yields
        if y.shape != (len(self.dates), len(self.maturities)):
            raise ValueError("yields shape does not match dates x maturities")
        if not np.all(np.diff(self.maturities) > 0):
            raise ValueError("maturities must be strictly increasing")
        if list(self.dates) != sorted(set(self.dates)):
            raise ValueError("dates must be strictly increasing and unique")
        if not np.isfinite(y).all():
            raise ValueError("yield panel contains missing or non-finite cells")


@dataclass(frozen=True)
class NsLoadings:
    lam: float
    maturities: np.ndarray
    Z: np.ndarray  # (N, 3)


@dataclass
class FactorSeries:
    dates: tuple
    values: np.ndarray  # (T, 3) columns level, slope, curvature
    source: str         # "two-step-ols" | "filtered" | "smoothed"

    @property
    def level(self):
        return self.values[:, 0]

    @property
    def slope(self):
        return self.values[:, 1]

    @property
    def curvature(self):
        return self.values[:, 2]


@dataclass
class Var1Fit:
    mu: np.ndarray       # (3,) factor means
    A: np.ndarray        # (3, 3) transition on demeaned factors
    Q: np.ndarray        # (3, 3) residual covariance
    residuals: np.ndarray


def _slope_loading(x):
    """(1 - exp(-x)) / x with a series expansion near zero."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x < 1e-8
    out[small] = 1.0 - x[small] / 2.0
    xs = x[~small]
    out[~small] = (1.0 - np.exp(-xs)) / xs
    return out


def ns_loadings(maturities, lam=DEFAULT_LAMBDA):
    """Loading matrix [1, (1-e^{-lt})/(lt), (1-e^{-lt})/(lt) - e^{-lt}]."""
    maturities = np.asarray(maturities, dtype=np.float64)
    if lam <= 0 or (maturities <= 0).any():
        raise ValueError("lambda and maturities must be positive")
    x = lam * maturities
    slope = _slope_loading(x)
    curv = slope - np.exp(-x)
    Z = np.column_stack([np.ones_like(slope), slope, curv])
    return NsLoadings(lam=float(lam), maturities=maturities, Z=Z)


def fit_cross_section(y, loadings):
    """Least-squares factors for one date's yield curve."""
    Z = loadings.Z
    if len(y) < 3:
        raise ValueError("need at least 3 maturities")
    if np.linalg.matrix_rank(Z) < 3:
        raise ValueError("rank-deficient loading matrix")
    f, *_ = np.linalg.lstsq(Z, np.asarray(y, dtype=np.float64), rcond=None)
    return f


def two_step(panel, lam=DEFAULT_LAMBDA):
    """Per-date cross-section fits followed by a VAR(1) on the factor series.

    The VAR is estimated on demeaned factors by OLS:
    (f_t - mu) = A (f_{t-1} - mu) + eta_t, with mu the sample mean and Q the
    residual covariance.
    """
    T = panel.yields.shape[0]
    if T < 5:
        raise ValueError("need at least 5 dates for the VAR step")
    load = ns_loadings(panel.maturities, lam)
    factors = np.empty((T, 3))
    for t in range(T):
        factors[t] = fit_cross_section(panel.yields[t], load)
    series = FactorSeries(dates=panel.dates, values=factors, source="two-step-ols")
    mu = factors.mean(axis=0)
    x = factors - mu
    X, Y = x[:-1], x[1:]
    if (X.std(axis=0) < 1e-12).any():
        raise ValueError("zero-variance factor: VAR(1) estimation degenerate")
    A, *_ = np.linalg.lstsq(X, Y, rcond=None)
    A = A.T
    resid = Y - X @ A.T
    Q = resid.T @ resid / (len(resid) - 1)
    return series, Var1Fit(mu=mu, A=A, Q=Q, residuals=resid)


def empirical_proxies(panel):
    """Model-free level/slope/curvature proxies from the 3, 36, 360 yields."""
    cols = {}
    for m in (3, 36, 360):
        hits = np.nonzero(panel.maturities == m)[0]
        if len(hits) == 0:
            raise ValueError(f"maturity {m} months required for proxies but absent")
        cols[m] = panel.yields[:, hits[0]]
    level = cols[360]
    slope = cols[3] - cols[360]
    curvature = 2 * cols[36] - cols[3] - cols[360]
    return level, slope, curvature
