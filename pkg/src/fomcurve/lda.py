"""Latent Dirichlet allocation fit by collapsed Gibbs sampling.

Token-level topic assignments are resampled in corpus order from the
count-based full conditional; theta and beta are read off the final
post-burn-in state with their symmetric-prior smoothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LdaConfig", "GibbsState", "LdaPosterior", "init_state",
           "gibbs_sweep", "estimate", "fit_lda"]


@dataclass(frozen=True)
class LdaConfig:
    n_topics: int
    alpha: float = None  # defaults to 50/K
    eta: float = 0.025
    burn_in: int = 500
    sweeps: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.n_topics)
        if self.alpha <= 0 or self.eta <= 0:
            raise ValueError("alpha and eta must be positive")
        if not self.sweeps > self.burn_in >= 0:
            raise ValueError("need sweeps > burn_in >= 0")


class GibbsState:
    """Topic assignments plus the sufficient-statistic count tables."""

    def __init__(self, docs, z, n_topics, n_terms):
        self.docs = docs          # list of np arrays of term ids
        self.z = z                # list of np arrays of topic ids
        self.n_topics = n_topics
        self.n_terms = n_terms
        self.n_dk = np.zeros((len(docs), n_topics), dtype=np.int64)
        self.n_kw = np.zeros((n_topics, n_terms), dtype=np.int64)
        self.n_k = np.zeros(n_topics, dtype=np.int64)
        for d, (ws, zs) in enumerate(zip(docs, z)):
            for w, k in zip(ws, zs):
                self.n_dk[d, k] += 1
                self.n_kw[k, w] += 1
                self.n_k[k] += 1

    @property
    def doc_lengths(self):
        return np.array([len(ws) for ws in self.docs])

    def check_consistency(self):
        if (self.n_dk < 0).any() or (self.n_kw < 0).any() or (self.n_k < 0).any():
            raise RuntimeError("negative count in Gibbs state")
        if not np.array_equal(self.n_dk.sum(axis=1), self.doc_lengths):
            raise RuntimeError("document-topic counts inconsistent with lengths")
        if not np.array_equal(self.n_kw.sum(axis=1), self.n_k):
            raise RuntimeError("topic-term counts inconsistent with topic totals")


@dataclass
class LdaPosterior:
    theta: np.ndarray  # (D, K)
    beta: np.ndarray   # (K, M)


def _encode(corpus, vocabulary):
    index = vocabulary.index
    return [np.array([index[t] for t in toks], dtype=np.int64) for toks in corpus]


def init_state(corpus, vocabulary, cfg, rng=None):
    """Assign every token a uniform random topic from the seeded stream."""
    if not corpus:
        raise ValueError("corpus is empty")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    docs = _encode(corpus, vocabulary)
    z = [rng.integers(0, cfg.n_topics, size=len(ws)) for ws in docs]
    return GibbsState(docs, z, cfg.n_topics, len(vocabulary))


def conditional(state, d, n, cfg):
    """Full conditional over topics for token n of document d, excluding it."""
    w = state.docs[d][n]
    k_old = state.z[d][n]
    n_dk = state.n_dk[d].astype(np.float64).copy()
    n_kw = state.n_kw[:, w].astype(np.float64).copy()
    n_k = state.n_k.astype(np.float64).copy()
    n_dk[k_old] -= 1
    n_kw[k_old] -= 1
    n_k[k_old] -= 1
    weights = (n_dk + cfg.alpha) * (n_kw + cfg.eta) / (n_k + state.n_terms * cfg.eta)
    return weights / weights.sum()


def sample_token(state, d, n, cfg, rng):
    """Resample one token's topic in place; counts stay consistent."""
    w = state.docs[d][n]
    k_old = state.z[d][n]
    state.n_dk[d, k_old] -= 1
    state.n_kw[k_old, w] -= 1
    state.n_k[k_old] -= 1
    if state.n_dk[d, k_old] < 0 or state.n_kw[k_old, w] < 0 or state.n_k[k_old] < 0:
        raise RuntimeError("negative count during Gibbs sweep")
    weights = ((state.n_dk[d] + cfg.alpha)
               * (state.n_kw[:, w] + cfg.eta)
               / (state.n_k + state.n_terms * cfg.eta))
    cum = np.cumsum(weights)
    k_new = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    k_new = min(k_new, state.n_topics - 1)
    state.z[d][n] = k_new
    state.n_dk[d, k_new] += 1
    state.n_kw[k_new, w] += 1
    state.n_k[k_new] += 1
    return k_new


def gibbs_sweep(state, cfg, rng):
    """One pass over every token in corpus order."""
    for d in range(len(state.docs)):
        for n in range(len(state.docs[d])):
            sample_token(state, d, n, cfg, rng)
    return state


def estimate(state, cfg):
    """Smoothed posterior point estimates from the current count tables."""
    K, M = state.n_topics, state.n_terms
    lengths = state.doc_lengths[:, None]
    theta = (state.n_dk + cfg.alpha) / (lengths + K * cfg.alpha)
    beta = (state.n_kw + cfg.eta) / (state.n_k[:, None] + M * cfg.eta)
    return LdaPosterior(theta=theta, beta=beta)


def fit_lda(corpus, vocabulary, cfg):
    """Run burn-in plus kept sweeps; posterior taken from the final state."""
    rng = np.random.default_rng(cfg.seed)
    state = init_state(corpus, vocabulary, cfg, rng)
    for _ in range(cfg.sweeps):
        gibbs_sweep(state, cfg, rng)
    state.check_consistency()
    return state, estimate(state, cfg)


def lda_modeler(corpus, vocabulary, base_cfg):
    """Factory: returns modeler(k) ranking terms by estimated beta."""
    from dataclasses import replace

    def modeler(k):
        cfg = replace(base_cfg, n_topics=k, alpha=None)
        _, post = fit_lda(corpus, vocabulary, cfg)
        out = []
        for t in range(k):
            row = post.beta[t]
            order = np.lexsort((np.arange(len(row)), -row))
            out.append([vocabulary.terms[j] for j in order])
        return out

    return modeler
