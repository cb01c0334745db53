"""UMass-style topic coherence and automatic selection of the topic count.

Two variants are provided: the raw log count-ratio form with +1 smoothing,
and the normalized probability form with a small epsilon in the numerator.
The normalized form drives model selection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CoherenceConfig",
    "CoherenceReport",
    "doc_freqs",
    "tc_lcp_raw",
    "tc_lcp_star",
    "select_k",
]


@dataclass(frozen=True)
class CoherenceConfig:
    n_top: int = 15
    epsilon: float = 1e-12
    k_range: tuple = (3, 30)  # inclusive

    def __post_init__(self):
        if self.n_top < 2:
            raise ValueError("n_top must be >= 2")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.k_range[1] < self.k_range[0]:
            raise ValueError("empty k_range")


@dataclass
class CoherenceReport:
    per_k: dict  # k -> (list of per-topic scores, mean score)
    best_k: int


def doc_freqs(cm, words):
    """Document and co-document frequencies for the given vocabulary terms.

    Returns (single, pair) where single[w] counts documents containing w and
    pair[(wi, wj)] counts documents containing both (stored symmetrically).
    """
    index = cm.vocabulary.index
    cols = []
    for w in words:
        if w not in index:
            raise KeyError(f"unknown term {w!r}")
        cols.append(index[w])
    present = cm.counts[:, cols] > 0  # (docs, words)
    single = {w: int(present[:, i].sum()) for i, w in enumerate(words)}
    pair = {}
    for i, wi in enumerate(words):
        for j in range(i):
            wj = words[j]
            co = int((present[:, i] & present[:, j]).sum())
            pair[(wi, wj)] = co
            pair[(wj, wi)] = co
    return single, pair


def tc_lcp_raw(top_words, cm):
    """Raw coherence: sum over ordered pairs of ln((D(wi,wj)+1)/D(wj)).

    top_words must be ordered from most- to least-weighted.
    """
    single, pair = doc_freqs(cm, top_words)
    total = 0.0
    for i in range(1, len(top_words)):
        for j in range(i):
            wi, wj = top_words[i], top_words[j]
            total += np.log((pair[(wi, wj)] + 1) / single[wj])
    return float(total)


def tc_lcp_star(top_words, cm, epsilon):
    """Normalized coherence over ordered pairs of empirical probabilities."""
    single, pair = doc_freqs(cm, top_words)
    D = cm.n_docs
    n = len(top_words)
    total = 0.0
    for i in range(1, n):
        for j in range(i):
            wi, wj = top_words[i], top_words[j]
            p_ij = pair[(wi, wj)] / D
            p_j = single[wj] / D
            total += np.log((p_ij + epsilon) / p_j)
    return float(2.0 / (n * (n - 1)) * total)


def select_k(cm, cfg, modeler):
    """Sweep k over cfg.k_range and pick the mean-coherence maximizer.

    modeler(k) must return, per topic, the vocabulary terms ranked from most-
    to least-weighted (at least cfg.n_top of them).  Ties in the mean go to
    the smaller k.
    """
    lo, hi = cfg.k_range
    per_k = {}
    best_k, best_mean = None, -np.inf
    for k in range(lo, hi + 1):
        topics = modeler(k)
        scores = [tc_lcp_star(list(t[: cfg.n_top]), cm, cfg.epsilon) for t in topics]
        mean = float(np.mean(scores))
        per_k[k] = (scores, mean)
        # require a margin beyond rounding noise so exact ties resolve to
        # the smaller k regardless of summation order
        if best_k is None or mean > best_mean + 1e-12 * max(1.0, abs(best_mean)):
            best_k, best_mean = k, mean
    return CoherenceReport(per_k=per_k, best_k=best_k)


def nmf_modeler(A, base_cfg):
    """Factory: returns modeler(k) backed by NMF fits on the weighted matrix."""
    from dataclasses import replace

    from . import nmf

    def modeler(k):
        model = nmf.fit(A.weights, replace(base_cfg, k=k))
        return [nmf.top_terms(model.H, t, model.H.shape[1], A.vocabulary)
                for t in range(k)]

    return modeler
