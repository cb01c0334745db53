"""Configuration, ingestion, stage orchestration, and report emission.

Stages write deterministic artifacts into the output directory and are
cached by content digest: a stage reruns only when its configuration or any
upstream input changed.  Every emitted table carries stage and config-hash
provenance columns.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from . import coherence, econometrics, lda, nmf, statespace, termstructure, textprep
from .econometrics import CRISIS_WINDOW

__all__ = ["PipelineConfig", "ValidationError", "load_config", "ingest",
           "run_stage", "run_all", "STAGES"]

TOOL_VERSION = "0.1.0"
FLOAT_FMT = "%.12g"


class ValidationError(ValueError):
    """Bad input data or configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class PipelineConfig:
    statements_dir: str
    yields_csv: str
    controls_csv: str
    output_dir: str
    stopwords_path: str = None
    names_path: str = None
    markers_path: str = None
    lemma_rules_path: str = None
    lemma_exceptions_path: str = None
    topic_model: str = "nmf"           # "nmf" | "lda"
    k: int = 3
    auto_select_k: bool = False
    k_range: tuple = (2, 6)
    coherence_n: int = 15
    coherence_epsilon: float = 1e-12
    lda_sweeps: int = 200
    lda_burn_in: int = 50
    lam: float = termstructure.DEFAULT_LAMBDA
    estimate_lambda: bool = False
    mle_max_iter: int = 200
    crisis_window: tuple = CRISIS_WINDOW
    subsamples: tuple = ()             # ((name, start, end), ...)
    seed: int = 0

    def __post_init__(self):
        if self.topic_model not in ("nmf", "lda"):
            raise ValidationError(f"unknown topic model {self.topic_model!r}")
        if not (1 <= self.k_range[0] <= self.k_range[1] <= 100):
            raise ValidationError("k range must lie within [1, 100]")

    def canonical(self):
        # path fields enter by basename so the hash survives relocation;
        # file contents are covered separately by the input digests
        d = {}
        for k, v in self.__dict__.items():
            if k == "output_dir":
                continue
            if k in _PATH_KEYS and v is not None:
                v = os.path.basename(v)
            d[k] = list(v) if isinstance(v, tuple) else v
        return json.dumps(d, sort_keys=True)

    @property
    def config_hash(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


# path keys that FOMCURVE_<KEY> environment variables may override
_PATH_KEYS = ("statements_dir", "yields_csv", "controls_csv", "output_dir",
              "stopwords_path", "names_path", "markers_path",
              "lemma_rules_path", "lemma_exceptions_path")


def load_config(path, overrides=None):
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    for key in _PATH_KEYS:
        env = os.environ.get(f"FOMCURVE_{key.upper()}")
        if env:
            raw[key] = os.path.abspath(env)
    base = Path(path).parent

    def respath(p):
        if p is None:
            return None
        p = Path(p)
        return str(p if p.is_absolute() else base / p)

    kw = {
        "statements_dir": respath(raw.get("statements_dir")),
        "yields_csv": respath(raw.get("yields_csv")),
        "controls_csv": respath(raw.get("controls_csv")),
        "output_dir": respath(raw.get("output_dir", "out")),
    }
    for key in ("stopwords_path", "names_path", "markers_path",
                "lemma_rules_path", "lemma_exceptions_path"):
        kw[key] = respath(raw.get(key))
    for key in ("topic_model", "k", "auto_select_k", "coherence_n",
                "coherence_epsilon", "lda_sweeps", "lda_burn_in", "lam",
                "estimate_lambda", "mle_max_iter", "seed"):
        if key in raw:
            kw[key] = raw[key]
    if "k_range" in raw:
        kw["k_range"] = tuple(raw["k_range"])
    if "crisis_window" in raw:
        kw["crisis_window"] = tuple(raw["crisis_window"])
    if "subsamples" in raw:
        kw["subsamples"] = tuple(tuple(s) for s in raw["subsamples"])
    missing = [k for k in ("statements_dir", "yields_csv", "controls_csv")
               if kw[k] is None]
    if missing:
        raise ValidationError(f"config missing required paths: {missing}")
    cfg = PipelineConfig(**kw)
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


# ---------------------------------------------------------------------------
# ingestion

@dataclass
class Bundle:
    doc_dates: tuple
    corpus: list           # token lists
    panel: termstructure.YieldPanel
    control_dates: tuple
    controls: np.ndarray   # (T, 3)
    coverage_gaps: list    # trading days without controls


def _read_statements(directory, prep_cfg):
    paths = sorted(Path(directory).glob("*.txt"))
    if not paths:
        raise ValidationError(f"no statement files in {directory}")
    dates, corpus = [], []
    for p in paths:
        date = p.stem
        try:
            time.strptime(date, "%Y-%m-%d")
        except ValueError:
            raise ValidationError(f"statement file {p.name}: name is not YYYY-MM-DD.txt")
        doc = textprep.RawDocument(id=date, date=date, text=p.read_text("utf-8"))
        corpus.append(textprep.preprocess(doc, prep_cfg))
        dates.append(date)
    if len(set(dates)) != len(dates):
        raise ValidationError("duplicate statement dates")
    return tuple(dates), corpus


def _read_panel(path):
    try:
        df = pd.read_csv(path)
    except Exception as exc:
        raise ValidationError(f"malformed yields CSV {path}: {exc}")
    if df.shape[1] < 4:
        raise ValidationError("yield panel needs a date column and >= 3 maturities")
    dates = [str(d) for d in df.iloc[:, 0]]
    dupes = {d for d in dates if dates.count(d) > 1}
    if dupes:
        raise ValidationError(f"duplicate panel date: {sorted(dupes)[0]}")
    try:
        maturities = np.array([float(c) for c in df.columns[1:]])
    except ValueError:
        raise ValidationError("yield panel columns must be maturities in months")
    yields = df.iloc[:, 1:].to_numpy(dtype=np.float64)
    if np.isnan(yields).any():
        r, c = np.argwhere(np.isnan(yields))[0]
        raise ValidationError(f"missing yield at row {r + 1}, column {df.columns[c + 1]}")
    return termstructure.YieldPanel(dates=tuple(dates), maturities=maturities,
                                    yields=yields)


def _read_controls(path):
    try:
        df = pd.read_csv(path)
    except Exception as exc:
        raise ValidationError(f"malformed controls CSV {path}: {exc}")
    need = ["date", "term_spread", "credit_spread", "vix"]
    if list(df.columns) != need:
        raise ValidationError(f"controls CSV must have columns {need}")
    dates = tuple(str(d) for d in df["date"])
    if len(set(dates)) != len(dates):
        raise ValidationError("duplicate control dates")
    return dates, df[need[1:]].to_numpy(dtype=np.float64)


def build_prep_config(cfg):
    return textprep.default_config(
        stopwords_path=cfg.stopwords_path, names_path=cfg.names_path,
        markers_path=cfg.markers_path, lemma_rules_path=cfg.lemma_rules_path,
        lemma_exceptions_path=cfg.lemma_exceptions_path)


def ingest(cfg):
    """Read and validate the statement corpus, yield panel, and controls."""
    prep_cfg = build_prep_config(cfg)
    doc_dates, corpus = _read_statements(cfg.statements_dir, prep_cfg)
    panel = _read_panel(cfg.yields_csv)
    control_dates, controls = _read_controls(cfg.controls_csv)
    ctrl_set = set(control_dates)
    gaps = [d for d in panel.dates if d not in ctrl_set]
    return Bundle(doc_dates=doc_dates, corpus=corpus, panel=panel,
                  control_dates=control_dates, controls=controls,
                  coverage_gaps=gaps)


# ---------------------------------------------------------------------------
# deterministic writers

def _write_csv(df, path):
    df.to_csv(path, index=False, float_format=FLOAT_FMT, lineterminator="\n")


def _write_json(obj, path):
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", "utf-8")


def _provenance(df, stage, cfg):
    df = df.copy()
    df["stage"] = stage
    df["config_hash"] = cfg.config_hash
    return df


def _digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# stages

def _input_digests(cfg):
    out = {}
    for p in sorted(Path(cfg.statements_dir).glob("*.txt")):
        out[f"statements/{p.name}"] = _digest(p)
    out["yields"] = _digest(cfg.yields_csv)
    out["controls"] = _digest(cfg.controls_csv)
    for key in ("stopwords_path", "names_path", "markers_path",
                "lemma_rules_path", "lemma_exceptions_path"):
        p = getattr(cfg, key)
        if p:
            out[key] = _digest(p)
    return out


def stage_ingest(cfg, out):
    bundle = ingest(cfg)
    _write_json({
        "n_statements": len(bundle.doc_dates),
        "n_trading_days": len(bundle.panel.dates),
        "n_maturities": len(bundle.panel.maturities),
        "first_date": bundle.panel.dates[0],
        "last_date": bundle.panel.dates[-1],
        "control_coverage_gaps": bundle.coverage_gaps,
    }, out / "summary.json")
    return ["summary.json"]


def _fit_topics(cfg, bundle, k):
    cm = textprep.build_matrix(bundle.corpus,
                               [(d, d) for d in bundle.doc_dates])
    A = textprep.tfidf(cm)
    if cfg.topic_model == "nmf":
        model = nmf.fit(A.weights, nmf.NmfConfig(k=k, seed=cfg.seed))
        weights = model.W
        term_weights = model.H
        sidecar = {"model": "nmf", "k": k, "iterations": model.iterations,
                   "final_objective": model.objective_trace[-1],
                   "init": "nndsvd", "seed": cfg.seed}
    else:
        lcfg = lda.LdaConfig(n_topics=k, sweeps=cfg.lda_sweeps,
                             burn_in=cfg.lda_burn_in, seed=cfg.seed)
        _, post = lda.fit_lda(bundle.corpus, cm.vocabulary, lcfg)
        weights = post.theta
        term_weights = post.beta
        sidecar = {"model": "lda", "K": k, "alpha": lcfg.alpha, "eta": lcfg.eta,
                   "sweeps": lcfg.sweeps, "burn_in": lcfg.burn_in,
                   "seed": cfg.seed}
    return cm, A, weights, term_weights, sidecar


def stage_topics(cfg, out):
    bundle = ingest(cfg)
    k = cfg.k
    if cfg.auto_select_k:
        k = _select_best_k(cfg, bundle)
    cm, A, weights, term_weights, sidecar = _fit_topics(cfg, bundle, k)
    terms = list(cm.vocabulary.terms)
    dtm = pd.DataFrame(A.weights, columns=terms)
    dtm.insert(0, "date", list(bundle.doc_dates))
    _write_csv(_provenance(dtm, "topics", cfg), out / "dtm.csv")
    wdf = pd.DataFrame(weights, columns=[f"topic_{i + 1}" for i in range(k)])
    wdf.insert(0, "date", list(bundle.doc_dates))
    _write_csv(_provenance(wdf, "topics", cfg), out / "doc_topics.csv")
    hdf = pd.DataFrame(term_weights, columns=terms)
    hdf.insert(0, "topic", [f"topic_{i + 1}" for i in range(k)])
    _write_csv(_provenance(hdf, "topics", cfg), out / "topic_terms.csv")
    _write_json(sidecar, out / "model.json")
    return ["dtm.csv", "doc_topics.csv", "topic_terms.csv", "model.json"]


def _coherence_table(cfg, bundle, model_name):
    cm = textprep.build_matrix(bundle.corpus)
    A = textprep.tfidf(cm)
    ccfg = coherence.CoherenceConfig(n_top=min(cfg.coherence_n, cm.n_terms),
                                     epsilon=cfg.coherence_epsilon,
                                     k_range=cfg.k_range)
    if model_name == "nmf":
        modeler = coherence.nmf_modeler(A, nmf.NmfConfig(k=2, seed=cfg.seed))
    else:
        base = lda.LdaConfig(n_topics=2, sweeps=cfg.lda_sweeps,
                             burn_in=cfg.lda_burn_in, seed=cfg.seed)
        modeler = lda.lda_modeler(bundle.corpus, cm.vocabulary, base)
    return coherence.select_k(cm, ccfg, modeler)


def _report_to_df(report, model_name):
    rows = []
    for k in sorted(report.per_k):
        scores, mean = report.per_k[k]
        for t, s in enumerate(scores):
            rows.append({"model": model_name, "k": k, "topic_id": t + 1,
                         "coherence": s, "mean_coherence": mean})
    return pd.DataFrame(rows)


def _select_best_k(cfg, bundle):
    return _coherence_table(cfg, bundle, cfg.topic_model).best_k


def stage_select_k(cfg, out):
    bundle = ingest(cfg)
    frames = []
    best = {}
    for name in ("nmf", "lda"):
        report = _coherence_table(cfg, bundle, name)
        frames.append(_report_to_df(report, name))
        best[name] = report.best_k
    df = pd.concat(frames, ignore_index=True)
    _write_csv(_provenance(df, "select_k", cfg), out / "coherence.csv")
    _write_json({"best_k": best, "selected_model": cfg.topic_model,
                 "k_range": list(cfg.k_range)}, out / "best_k.json")
    return ["coherence.csv", "best_k.json"]


def stage_curve(cfg, out):
    bundle = ingest(cfg)
    panel = bundle.panel
    series, var1 = termstructure.two_step(panel, cfg.lam)
    opts = statespace.MleOptions(estimate_lambda=cfg.estimate_lambda,
                                 max_iter=cfg.mle_max_iter)
    model, kf, sm, res = statespace.mle_fit(panel, init=(series, var1),
                                            opts=opts, lam=cfg.lam)
    filtered, smoothed = statespace.factor_series(panel, model, kf, sm)
    rows = []
    for fs in (series, filtered, smoothed):
        for t, d in enumerate(fs.dates):
            rows.append({"date": d, "level": fs.values[t, 0],
                         "slope": fs.values[t, 1], "curvature": fs.values[t, 2],
                         "source": fs.source})
    _write_csv(_provenance(pd.DataFrame(rows), "curve", cfg), out / "factors.csv")
    lv, sl, cu = termstructure.empirical_proxies(panel)
    prox = pd.DataFrame({"date": list(panel.dates), "level_proxy": lv,
                         "slope_proxy": sl, "curvature_proxy": cu})
    _write_csv(_provenance(prox, "curve", cfg), out / "proxies.csv")
    _write_json({
        "transition": model.T_mat.tolist(),
        "mu": model.mu.tolist(),
        "H_diag": model.H_diag.tolist(),
        "Q": model.Q.tolist(),
        "a0": model.a0.tolist(),
        "P0": model.P0.tolist(),
        "lambda": model.lam,
        "loglik": kf.loglik,
        "optimizer": {"iterations": res.n_iter, "evaluations": res.n_eval,
                      "converged": res.converged, "message": res.message},
    }, out / "model.json")
    return ["factors.csv", "proxies.csv", "model.json"]


def _load_stage_factors(cfg, source="smoothed"):
    path = Path(cfg.output_dir) / "curve" / "factors.csv"
    if not path.exists():
        raise ValidationError("curve stage output missing; run curve first")
    df = pd.read_csv(path)
    df = df[df["source"] == source]
    return termstructure.FactorSeries(
        dates=tuple(df["date"]),
        values=df[["level", "slope", "curvature"]].to_numpy(),
        source=source)


def _load_stage_topics(cfg):
    path = Path(cfg.output_dir) / "topics" / "doc_topics.csv"
    if not path.exists():
        raise ValidationError("topics stage output missing; run topics first")
    df = pd.read_csv(path)
    topic_cols = [c for c in df.columns if c.startswith("topic_")]
    return tuple(df["date"]), df[topic_cols].to_numpy()


def _fit_to_rows(fit):
    rows = []
    for name, b, se, t in zip(fit.column_names, fit.params, fit.se, fit.tstats):
        rows.append({"variable": name, "coefficient": b, "se": se, "t": t,
                     "stars": econometrics.significance_stars(t)})
    return rows


def _emit_fit(fit, name, cfg, out):
    df = pd.DataFrame(_fit_to_rows(fit))
    df["N"] = fit.nobs
    df["adj_r2"] = fit.adj_r2
    df["dropped"] = ";".join(fit.dropped_columns)
    _write_csv(_provenance(df, "regress", cfg), out / f"{name}.csv")
    payload = {
        "specification": name,
        "coefficients": {r["variable"]: {"coefficient": r["coefficient"],
                                         "se": r["se"], "t": r["t"],
                                         "stars": r["stars"]}
                         for r in _fit_to_rows(fit)},
        "N": fit.nobs, "adj_r2": fit.adj_r2,
        "dropped_columns": fit.dropped_columns,
        "stage": "regress", "config_hash": cfg.config_hash,
    }
    _write_json(payload, out / f"{name}.json")
    lines = [f"== {name} ==",
             f"{'variable':<24}{'coef':>12}{'se':>12}{'t':>10}  sig"]
    for r in _fit_to_rows(fit):
        lines.append(f"{r['variable']:<24}{r['coefficient']:>12.4f}"
                     f"{r['se']:>12.4f}{r['t']:>10.4f}  {r['stars']}")
    lines.append(f"N = {fit.nobs}   adjusted R2 = {fit.adj_r2:.4f}")
    if fit.dropped_columns:
        lines.append(f"dropped (collinear): {', '.join(fit.dropped_columns)}")
    (out / f"{name}.txt").write_text("\n".join(lines) + "\n", "utf-8")
    return [f"{name}.csv", f"{name}.json", f"{name}.txt"]


def _build_dataset(cfg, bundle):
    factors = _load_stage_factors(cfg)
    theme_dates, theme_weights = _load_stage_topics(cfg)
    return econometrics.build_daily(
        factors, theme_dates, theme_weights,
        bundle.control_dates, bundle.controls,
        crisis_window=cfg.crisis_window)


def stage_regress(cfg, out):
    bundle = ingest(cfg)
    ds = _build_dataset(cfg, bundle)
    written = []
    for factor in ("level", "slope", "curvature"):
        fit = econometrics.event_study(ds, factor, with_crisis=False)
        written += _emit_fit(fit, f"event_{factor}", cfg, out)
        fit = econometrics.event_study(ds, factor, with_crisis=True)
        written += _emit_fit(fit, f"event_crisis_{factor}", cfg, out)
        spec = econometrics.SpecConfig(dependent=factor,
                                       crisis_window=cfg.crisis_window)
        written += _emit_fit(econometrics.theme_regression(ds, spec),
                             f"baseline_{factor}", cfg, out)
        spec = replace(spec, include_crisis=True, include_interactions=True)
        written += _emit_fit(econometrics.theme_regression(ds, spec),
                             f"crisis_{factor}", cfg, out)
        for name, lo, hi in cfg.subsamples:
            spec = econometrics.SpecConfig(dependent=factor, sample=(lo, hi),
                                           crisis_window=cfg.crisis_window)
            written += _emit_fit(econometrics.theme_regression(ds, spec),
                                 f"{name}_{factor}", cfg, out)
    return written


def stage_report(cfg, out):
    outdir = Path(cfg.output_dir)
    written = []
    # (a) coherence vs k
    src = outdir / "select_k" / "coherence.csv"
    if not src.exists():
        raise ValidationError("select-k stage output missing; run select-k first")
    coh = pd.read_csv(src)
    mean_rows = coh.drop_duplicates(["model", "k"])[["model", "k", "mean_coherence"]]
    _write_csv(_provenance(mean_rows.reset_index(drop=True), "report", cfg),
               out / "coherence_vs_k.csv")
    written.append("coherence_vs_k.csv")
    # (b) theme weights over time with crisis shading metadata
    theme_dates, theme_weights = _load_stage_topics(cfg)
    lo, hi = cfg.crisis_window
    tw = pd.DataFrame(theme_weights,
                      columns=[f"theme_{i + 1}" for i in range(theme_weights.shape[1])])
    tw.insert(0, "date", list(theme_dates))
    tw["crisis_shading"] = [(1 if lo <= d <= hi else 0) for d in theme_dates]
    _write_csv(_provenance(tw, "report", cfg), out / "theme_weights.csv")
    written.append("theme_weights.csv")
    # (c) factor vs proxy comparison
    factors = pd.read_csv(outdir / "curve" / "factors.csv")
    proxies = pd.read_csv(outdir / "curve" / "proxies.csv")
    rows = []
    for source in ("two-step-ols", "filtered", "smoothed"):
        sub = factors[factors["source"] == source]
        merged = sub.merge(proxies, on="date")
        for fac, prox in (("level", "level_proxy"), ("slope", "slope_proxy"),
                          ("curvature", "curvature_proxy")):
            corr = float(np.corrcoef(merged[fac], merged[prox])[0, 1])
            rows.append({"source": source, "factor": fac, "proxy_corr": corr})
    _write_csv(_provenance(pd.DataFrame(rows), "report", cfg),
               out / "factor_vs_proxy.csv")
    written.append("factor_vs_proxy.csv")
    # (d) regression tables, aggregated
    regdir = outdir / "regress"
    if not regdir.exists():
        raise ValidationError("regress stage output missing; run regress first")
    frames = []
    text_parts = []
    for path in sorted(regdir.glob("*.csv")):
        df = pd.read_csv(path)
        df.insert(0, "specification", path.stem)
        frames.append(df)
        text_parts.append((regdir / f"{path.stem}.txt").read_text("utf-8"))
    allreg = pd.concat(frames, ignore_index=True)
    allreg["stage"] = "report"
    allreg["config_hash"] = cfg.config_hash
    _write_csv(allreg, out / "regressions.csv")
    _write_json(json.loads(json.dumps(
        {p.stem: json.loads(p.read_text("utf-8"))
         for p in sorted(regdir.glob("*.json"))})), out / "regressions.json")
    (out / "regressions.txt").write_text("\n".join(text_parts), "utf-8")
    written += ["regressions.csv", "regressions.json", "regressions.txt"]
    return written


STAGES = {
    "ingest": (stage_ingest, ()),
    "topics": (stage_topics, ()),
    "select-k": (stage_select_k, ()),
    "curve": (stage_curve, ()),
    "regress": (stage_regress, ("topics", "curve")),
    "report": (stage_report, ("select-k", "curve", "regress")),
}
_ORDER = ["ingest", "topics", "select-k", "curve", "regress", "report"]


def _manifest_path(cfg):
    return Path(cfg.output_dir) / "manifest.json"


def _load_manifest(cfg):
    path = _manifest_path(cfg)
    if path.exists():
        return json.loads(path.read_text("utf-8"))
    return {"tool_version": TOOL_VERSION, "stages": {}}


def _stage_dir(cfg, stage):
    return Path(cfg.output_dir) / stage.replace("-", "_")


def _stage_key(cfg, stage, inputs):
    payload = {"config": cfg.canonical(), "inputs": inputs, "stage": stage}
    for dep in STAGES[stage][1]:
        dep_dir = _stage_dir(cfg, dep)
        payload[f"dep:{dep}"] = {p.name: _digest(p)
                                 for p in sorted(dep_dir.glob("*"))} \
            if dep_dir.exists() else {}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def run_stage(cfg, stage, force=False):
    """Run one stage (dependencies must already have run).  Returns
    (status, outputs) where status is "ran" or "cached"."""
    if stage not in STAGES:
        raise ValidationError(f"unknown stage {stage!r}")
    fn, _deps = STAGES[stage]
    inputs = _input_digests(cfg)
    manifest = _load_manifest(cfg)
    key = _stage_key(cfg, stage, inputs)
    rec = manifest["stages"].get(stage)
    out = _stage_dir(cfg, stage)
    if not force and rec and rec["key"] == key:
        ok = all((out / name).exists() and _digest(out / name) == dig
                 for name, dig in rec["outputs"].items())
        if ok:
            return "cached", sorted(rec["outputs"])
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    names = fn(cfg, out)
    elapsed = time.time() - started
    manifest = _load_manifest(cfg)
    manifest["tool_version"] = TOOL_VERSION
    manifest["config_hash"] = cfg.config_hash
    manifest["input_digests"] = inputs
    manifest["stages"][stage] = {
        "key": key,
        "outputs": {name: _digest(out / name) for name in names},
        "elapsed_seconds": round(elapsed, 3),
    }
    _write_json(manifest, _manifest_path(cfg))
    return "ran", sorted(names)


def run_all(cfg, force_stage=None):
    """Run every stage in dependency order; returns {stage: status}."""
    statuses = {}
    for stage in _ORDER:
        statuses[stage] = run_stage(cfg, stage,
                                    force=(force_stage in (stage, "all")))[0]
    return statuses
