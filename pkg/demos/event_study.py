"""Relate statement-day theme changes to daily yield-factor moves.

Uses the artifacts of the staged pipeline: runs the needed stages on the
bundled sample data (cached after the first run), then rebuilds the daily
dataset and prints the main regression tables.  Run from the repository
root:

    python3 demos/event_study.py
"""

import pathlib
import tempfile

from fomcurve import econometrics, pipeline

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures"
WORKDIR = pathlib.Path(tempfile.gettempdir()) / "fomcurve-demo"


def show(fit, title):
    print(f"\n{title}")
    print(f"  {'variable':<22}{'coef':>10}{'se':>10}{'t':>8}  sig")
    for name, b, se, t in zip(fit.column_names, fit.params, fit.se, fit.tstats):
        stars = econometrics.significance_stars(t)
        print(f"  {name:<22}{b:>10.4f}{se:>10.4f}{t:>8.2f}  {stars}")
    print(f"  N = {fit.nobs}, adjusted R2 = {fit.adj_r2:.4f}")
    if fit.dropped_columns:
        print(f"  dropped as collinear: {', '.join(fit.dropped_columns)}")


def main():
    cfg = pipeline.load_config(FIXTURES / "config.yaml",
                               {"output_dir": str(WORKDIR)})
    for stage in ("topics", "curve"):
        status, _ = pipeline.run_stage(cfg, stage)
        print(f"{stage}: {status}")

    bundle = pipeline.ingest(cfg)
    ds = pipeline._build_dataset(cfg, bundle)
    print(f"\ndaily dataset: {len(ds.dates)} days, "
          f"{int(ds.event.sum())} statement days, "
          f"{int(ds.crisis.sum())} crisis days")

    show(econometrics.event_study(ds, "curvature"),
         "event study: |daily curvature change| on statement dummy")
    show(econometrics.event_study(ds, "curvature", with_crisis=True),
         "event study with crisis dummy and interaction")
    spec = econometrics.SpecConfig(dependent="curvature")
    show(econometrics.theme_regression(ds, spec),
         "theme regression: |curvature change| on theme-weight changes")


if __name__ == "__main__":
    main()
