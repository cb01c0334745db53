"""Estimate level/slope/curvature factors from the bundled daily yield panel.

Compares the quick two-step estimates (per-date cross-section OLS plus a
VAR(1)) against the state-space maximum-likelihood fit, and checks both
against the model-free proxies.  Run from the repository root:

    python3 demos/yield_curve_factors.py
"""

import pathlib

import numpy as np
import pandas as pd

from fomcurve import statespace, termstructure

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def load_panel():
    df = pd.read_csv(FIXTURES / "yields.csv")
    maturities = np.array([float(c) for c in df.columns[1:]])
    return termstructure.YieldPanel(
        dates=tuple(df.iloc[:, 0]),
        maturities=maturities,
        yields=df.iloc[:, 1:].to_numpy(dtype=np.float64))


def main():
    panel = load_panel()
    print(f"panel: {len(panel.dates)} trading days x {len(panel.maturities)} maturities")

    series, var1 = termstructure.two_step(panel)
    print("\ntwo-step factor means:", np.round(var1.mu, 3))
    print("VAR(1) diagonal persistence:", np.round(np.diag(var1.A), 3))

    model, kf, sm, res = statespace.mle_fit(
        panel, init=(series, var1),
        opts=statespace.MleOptions(max_iter=15))
    print(f"\nMLE: loglik {kf.loglik:.1f} after {res.n_iter} iterations "
          f"({res.message})")
    print("estimated measurement noise sd by maturity:")
    for m, h in zip(panel.maturities, np.sqrt(model.H_diag)):
        print(f"  {int(m):4d} months: {h:.4f}")

    filtered, smoothed = statespace.factor_series(panel, model, kf, sm)
    level, slope, curv = termstructure.empirical_proxies(panel)
    proxies = {"level": level, "slope": slope, "curvature": curv}
    print("\ncorrelation with model-free proxies:")
    for fs in (series, filtered, smoothed):
        cors = [np.corrcoef(fs.values[:, i], proxies[name])[0, 1]
                for i, name in enumerate(("level", "slope", "curvature"))]
        print(f"  {fs.source:>12}: " + "  ".join(f"{c:.3f}" for c in cors))


if __name__ == "__main__":
    main()
