"""Daily regression dataset construction and the OLS specification family.

Theme weights are held constant between statement releases, so daily theme
changes are nonzero only on release days.  OLS uses classical standard errors
and drops collinear columns deterministically, later-ordered columns first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DailyDataset",
    "OlsFit",
    "SpecConfig",
    "CRISIS_WINDOW",
    "build_daily",
    "ols",
    "event_study",
    "theme_regression",
    "subsample",
]

CRISIS_WINDOW = ("2007-02-27", "2011-04-13")


@dataclass
class DailyDataset:
    dates: tuple              # trading days (ISO strings), first |delta| day onward
    abs_dfactor: dict         # name -> np.ndarray of |one-day factor changes|
    dtheme: np.ndarray        # (T, K) theme-weight changes, nonzero on event days
    event: np.ndarray         # (T,) 0/1
    crisis: np.ndarray        # (T,) 0/1
    controls: np.ndarray      # (T, 3) term spread, credit spread, vix
    control_names: tuple = ("term_spread", "credit_spread", "vix")


@dataclass
class OlsFit:
    params: np.ndarray
    se: np.ndarray
    tstats: np.ndarray
    adj_r2: float
    r2: float
    nobs: int
    column_names: list
    dropped_columns: list = field(default_factory=list)
    resid: np.ndarray = None
    fitted: np.ndarray = None


def _map_to_trading_day(date, trading_days):
    """Earliest trading day at or after the given date."""
    pos = np.searchsorted(np.array(trading_days), date)
    if pos >= len(trading_days):
        raise ValueError(f"statement date {date} has no following trading day")
    return trading_days[pos]


def build_daily(factors, statement_dates, theme_weights, control_dates, controls,
                crisis_window=CRISIS_WINDOW):
    """Assemble the aligned daily dataset.

    factors: FactorSeries whose dates define the trading-day calendar.
    statement_dates / theme_weights: per-statement release dates and (S, K)
    topic weights.  Statements on non-trading days map to the next trading
    day.  The first trading day has no one-day change and is excluded.
    """
    trading = list(factors.dates)
    theme_weights = np.asarray(theme_weights, dtype=np.float64)
    S, K = theme_weights.shape
    if len(statement_dates) != S:
        raise ValueError("statement dates and theme weights disagree in length")
    event_day = {}
    for s, date in enumerate(statement_dates):
        day = _map_to_trading_day(date, trading)
        event_day[day] = s
    ctrl_map = {d: i for i, d in enumerate(control_dates)}
    missing = [d for d in trading if d not in ctrl_map]
    if missing:
        raise ValueError(f"controls missing on trading days, first: {missing[0]}")

    values = factors.values
    dates = tuple(trading[1:])
    T = len(dates)
    abs_df = np.abs(np.diff(values, axis=0))
    dtheme = np.zeros((T, K))
    event = np.zeros(T)
    crisis = np.zeros(T)
    ctrl = np.empty((T, np.asarray(controls).shape[1]))
    lo, hi = crisis_window
    for t, day in enumerate(dates):
        if lo <= day <= hi:
            crisis[t] = 1.0
        ctrl[t] = np.asarray(controls)[ctrl_map[day]]
        if day in event_day:
            event[t] = 1.0
            s = event_day[day]
            if s > 0:
                dtheme[t] = theme_weights[s] - theme_weights[s - 1]
    return DailyDataset(
        dates=dates,
        abs_dfactor={"level": abs_df[:, 0], "slope": abs_df[:, 1],
                     "curvature": abs_df[:, 2]},
        dtheme=dtheme, event=event, crisis=crisis, controls=ctrl,
    )


def _select_independent(X, tol=1e-10):
    """Indices of columns kept by a sequential rank check, in original order.

    A column is dropped when its residual after projecting on the kept
    columns is below tol relative to its own norm, so collinear columns that
    appear later are the ones removed.
    """
    kept = []
    basis = np.empty((X.shape[0], 0))
    for j in range(X.shape[1]):
        col = X[:, j]
        norm = np.linalg.norm(col)
        if norm == 0:
            continue
        if basis.shape[1]:
            resid = col - basis @ (basis.T @ col)
        else:
            resid = col.copy()
        rnorm = np.linalg.norm(resid)
        if rnorm > tol * norm:
            kept.append(j)
            basis = np.column_stack([basis, resid / rnorm])
    return kept


def ols(y, X, column_names=None, tol=1e-10):
    """Least squares with classical standard errors and collinearity drops."""
    y = np.asarray(y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    n, p = X.shape
    if column_names is None:
        column_names = [f"x{j}" for j in range(p)]
    if len(y) != n or n < p + 1:
        raise ValueError("need rows(y) = rows(X) >= cols(X) + 1")
    if y.std() == 0:
        raise ValueError("zero-variance dependent variable")
    kept = _select_independent(X, tol)
    if not kept:
        raise ValueError("all regressors dropped as collinear or zero")
    dropped = [column_names[j] for j in range(p) if j not in kept]
    Xk = X[:, kept]
    beta, *_ = np.linalg.lstsq(Xk, y, rcond=None)
    fitted = Xk @ beta
    resid = y - fitted
    k = len(kept)
    dof = n - k
    s2 = resid @ resid / dof
    xtx_inv = np.linalg.inv(Xk.T @ Xk)
    se = np.sqrt(s2 * np.diag(xtx_inv))
    tss = ((y - y.mean()) ** 2).sum()
    rss = resid @ resid
    r2 = 1.0 - rss / tss
    # adjusted R2 counts regressors excluding the intercept
    n_slopes = k - 1 if any(np.allclose(Xk[:, j], Xk[0, j]) and Xk[0, j] != 0
                            for j in range(k)) else k
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - n_slopes - 1)
    return OlsFit(params=beta, se=se, tstats=beta / se, adj_r2=float(adj),
                  r2=float(r2), nobs=n,
                  column_names=[column_names[j] for j in kept],
                  dropped_columns=dropped, resid=resid, fitted=fitted)


def event_study(dataset, dependent, with_crisis=False):
    """|delta factor| on intercept + event dummy (+ crisis and interaction)."""
    y = dataset.abs_dfactor[dependent]
    if dataset.event.std() == 0:
        raise ValueError("no event variation in the sample")
    cols = [np.ones(len(y)), dataset.event]
    names = ["const", "event"]
    if with_crisis:
        cols += [dataset.crisis, dataset.event * dataset.crisis]
        names += ["crisis", "event_x_crisis"]
    cols.append(dataset.controls)
    X = np.column_stack(cols)
    names += list(dataset.control_names)
    return ols(y, X, names)


@dataclass(frozen=True)
class SpecConfig:
    dependent: str = "curvature"
    include_themes: tuple = None       # theme indices; None means all
    include_crisis: bool = False
    include_interactions: bool = False
    sample: tuple = None               # (start, end) ISO dates inclusive
    crisis_window: tuple = CRISIS_WINDOW


def theme_regression(dataset, spec):
    """Baseline or crisis-interaction specification on the configured sample."""
    ds = dataset
    if spec.sample is not None:
        ds = subsample(dataset, spec.sample)
    y = ds.abs_dfactor[spec.dependent]
    K = ds.dtheme.shape[1]
    themes = list(spec.include_themes) if spec.include_themes is not None else list(range(K))
    cols = [np.ones(len(y))]
    names = ["const"]
    for k in themes:
        cols.append(ds.dtheme[:, k])
        names.append(f"dtheme_{k + 1}")
    if spec.include_crisis:
        cols.append(ds.crisis)
        names.append("crisis")
    if spec.include_interactions:
        for k in themes:
            cols.append(ds.dtheme[:, k] * ds.crisis)
            names.append(f"dtheme_{k + 1}_x_crisis")
    cols.append(ds.controls)
    names += list(ds.control_names)
    X = np.column_stack(cols)
    return ols(y, X, names)


def subsample(dataset, interval):
    """Row filter on a closed date interval; all series truncated together."""
    lo, hi = interval
    mask = np.array([lo <= d <= hi for d in dataset.dates])
    if not mask.any():
        raise ValueError(f"interval {interval} does not intersect the data")
    return DailyDataset(
        dates=tuple(d for d, m in zip(dataset.dates, mask) if m),
        abs_dfactor={k: v[mask] for k, v in dataset.abs_dfactor.items()},
        dtheme=dataset.dtheme[mask],
        event=dataset.event[mask],
        crisis=dataset.crisis[mask],
        controls=dataset.controls[mask],
        control_names=dataset.control_names,
    )


def significance_stars(t):
    """Two-sided normal thresholds at 1/5/10 percent."""
    a = abs(t)
    if a >= 2.5758293035489004:
        return "***"
    if a >= 1.959963984540054:
        return "**"
    if a >= 1.6448536269514722:
        return "*"
    return ""
