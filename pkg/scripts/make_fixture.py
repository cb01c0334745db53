"""Generate the bundled synthetic fixture used by the end-to-end tests.

Writes tests/fixtures/: a small statement corpus with three planted themes
(one statement dated on a weekend), a daily yield panel simulated from the
three-factor model, matching daily controls, and a pipeline config.  Fully
deterministic, so rerunning reproduces the same bytes.
"""

import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[1]
OUT = ROOT / "tests" / "fixtures"

THEMES = {
    "growth": ["growth", "expansion", "output", "spending", "investment",
               "production", "activity", "demand"],
    "inflation": ["inflation", "price", "energy", "cost", "pressure",
                  "commodity", "wage", "expectation"],
    "credit": ["credit", "liquidity", "market", "strain", "bank",
               "funding", "lending", "stress"],
}

# statement date -> (theme emphasis weights over growth/inflation/credit)
STATEMENTS = [
    ("2006-01-31", (0.7, 0.2, 0.1)),
    ("2006-03-28", (0.6, 0.3, 0.1)),
    ("2006-06-29", (0.5, 0.4, 0.1)),
    ("2006-09-20", (0.5, 0.4, 0.1)),
    ("2006-12-12", (0.4, 0.5, 0.1)),
    ("2007-03-17", (0.4, 0.4, 0.2)),   # Saturday: exercises weekend mapping
    ("2007-06-28", (0.3, 0.4, 0.3)),
    ("2007-09-18", (0.2, 0.3, 0.5)),
    ("2007-12-11", (0.2, 0.2, 0.6)),
    ("2008-01-30", (0.1, 0.2, 0.7)),
    ("2008-03-18", (0.1, 0.1, 0.8)),
    ("2008-06-25", (0.2, 0.2, 0.6)),
]

FILLER = ("The committee reviewed recent developments and judged that policy "
          "remains appropriate for now. ")
VOTING = ("Voting for the FOMC monetary policy action were: the usual "
          "members of the committee.")


def business_days(start, end):
    days = np.arange(np.datetime64(start), np.datetime64(end) + 1)
    return [str(d) for d in days if np.is_busday(d)]


def write_statements(rng):
    d = OUT / "statements"
    d.mkdir(parents=True, exist_ok=True)
    for date, weights in STATEMENTS:
        words = []
        for (theme, vocab), w in zip(THEMES.items(), weights):
            reps = max(1, int(round(w * 40)))
            for i in range(reps):
                words.append(vocab[int(rng.integers(len(vocab)))])
        rng.shuffle(words)
        body = FILLER + " ".join(words) + ". " + FILLER + "\n\n" + VOTING + "\n"
        (d / f"{date}.txt").write_text(body, "utf-8")


def ns_loadings(maturities, lam=0.0609):
    x = lam * maturities
    slope = (1 - np.exp(-x)) / x
    return np.column_stack([np.ones_like(x), slope, slope - np.exp(-x)])


def write_panel_and_controls(rng):
    days = business_days("2006-01-02", "2008-06-30")
    T = len(days)
    maturities = np.array([3.0, 6.0, 12.0, 24.0, 36.0, 60.0, 120.0, 240.0, 360.0])
    Z = ns_loadings(maturities)
    mu = np.array([5.0, -1.2, 0.4])
    A = np.diag([0.995, 0.97, 0.94])
    chol = np.diag([0.08, 0.10, 0.15])
    x = np.zeros(3)
    factors = np.empty((T, 3))
    for t in range(T):
        x = A @ x + chol @ rng.standard_normal(3)
        factors[t] = mu + x
    yields = factors @ Z.T + 0.02 * rng.standard_normal((T, len(maturities)))

    lines = ["date," + ",".join(str(int(m)) for m in maturities)]
    for t, d in enumerate(days):
        lines.append(d + "," + ",".join(f"{v:.6f}" for v in yields[t]))
    (OUT / "yields.csv").write_text("\n".join(lines) + "\n", "utf-8")

    ts = yields[:, -1] - yields[:, 0]
    cs = 1.0 + 0.3 * np.abs(rng.standard_normal(T))
    vix = 15.0 + 5.0 * np.abs(rng.standard_normal(T))
    lines = ["date,term_spread,credit_spread,vix"]
    for t, d in enumerate(days):
        lines.append(f"{d},{ts[t]:.6f},{cs[t]:.6f},{vix[t]:.6f}")
    (OUT / "controls.csv").write_text("\n".join(lines) + "\n", "utf-8")


CONFIG = """\
statements_dir: statements
yields_csv: yields.csv
controls_csv: controls.csv
output_dir: out
topic_model: nmf
k: 3
k_range: [2, 4]
coherence_n: 8
lda_sweeps: 60
lda_burn_in: 20
mle_max_iter: 12
crisis_window: ["2007-02-27", "2011-04-13"]
subsamples:
  - ["pre2007", "2006-01-01", "2006-12-31"]
  - ["post2007", "2007-01-01", "2008-12-31"]
seed: 7
"""


def main():
    rng = np.random.default_rng(20240817)
    write_statements(rng)
    write_panel_and_controls(rng)
    (OUT / "config.yaml").write_text(CONFIG, "utf-8")
    print(f"fixture written under {OUT}")


if __name__ == "__main__":
    main()
