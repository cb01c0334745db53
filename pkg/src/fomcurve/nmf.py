"""Non-negative matrix factorization with multiplicative updates.

Factorizes a weighted document-term matrix A into W (documents x topics) and
H (topics x terms).  The update rules rescale H first and then W against the
updated H, which keeps the squared Frobenius objective non-increasing and
makes any exact factorization a fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import svd

__all__ = ["NmfConfig", "NmfModel", "objective", "update_step", "fit", "top_terms"]


@dataclass(frozen=True)
class NmfConfig:
    k: int
    max_iter: int = 1000
    rel_tol: float = 1e-6
    init: str = "nndsvd"  # "nndsvd" or "random"
    seed: int = 0
    denom_guard: float = 1e-12

    def __post_init__(self):
        if self.k < 1 or self.max_iter < 1:
            raise ValueError("k and max_iter must be >= 1")
        if self.rel_tol <= 0 or self.denom_guard <= 0:
            raise ValueError("rel_tol and denom_guard must be positive")
        if self.init not in ("nndsvd", "random"):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass
class NmfModel:
    W: np.ndarray  # (n, k)
    H: np.ndarray  # (k, m)
    objective_trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def objective(A, W, H):
    """Half the squared Frobenius norm of the reconstruction error."""
    A = np.asarray(A, dtype=np.float64)
    if W.shape[0] != A.shape[0] or H.shape[1] != A.shape[1] or W.shape[1] != H.shape[0]:
        raise ValueError("dimension mismatch between A, W, H")
    resid = A - W @ H
    return 0.5 * float(np.sum(resid * resid))


def update_step(A, W, H, guard=1e-12):
    """One multiplicative update: H against current W, then W against new H."""
    H_new = H * (W.T @ A) / (W.T @ W @ H + guard)
    W_new = W * (A @ H_new.T) / (W @ H_new @ H_new.T + guard)
    if not (np.isfinite(H_new).all() and np.isfinite(W_new).all()):
        raise FloatingPointError("non-finite values produced by multiplicative update")
    return W_new, H_new


def _nndsvd_init(A, k, guard):
    """Deterministic SVD-based init; negative parts folded into paired factors.

    Zeros are lifted to a small positive level so the multiplicative updates
    cannot lock entries at zero.
    """
    U, s, Vt = svd(A, full_matrices=False)
    W = np.zeros((A.shape[0], k))
    H = np.zeros((k, A.shape[1]))
    W[:, 0] = np.sqrt(s[0]) * np.abs(U[:, 0])
    H[0, :] = np.sqrt(s[0]) * np.abs(Vt[0, :])
    for j in range(1, k):
        u, v = U[:, j], Vt[j, :]
        up, un = np.clip(u, 0, None), np.clip(-u, 0, None)
        vp, vn = np.clip(v, 0, None), np.clip(-v, 0, None)
        n_up, n_vp = np.linalg.norm(up), np.linalg.norm(vp)
        n_un, n_vn = np.linalg.norm(un), np.linalg.norm(vn)
        if n_up * n_vp >= n_un * n_vn:
            sigma = n_up * n_vp
            if sigma > 0:
                W[:, j] = np.sqrt(s[j] * sigma) * up / n_up
                H[j, :] = np.sqrt(s[j] * sigma) * vp / n_vp
        else:
            sigma = n_un * n_vn
            if sigma > 0:
                W[:, j] = np.sqrt(s[j] * sigma) * un / n_un
                H[j, :] = np.sqrt(s[j] * sigma) * vn / n_vn
    floor = max(A[A > 0].mean() * 1e-2 if (A > 0).any() else guard, guard)
    W[W <= 0] = floor
    H[H <= 0] = floor
    return W, H


def fit(A, cfg):
    """Iterate multiplicative updates from the configured initialization.

    Stops when the relative objective change drops below cfg.rel_tol or after
    cfg.max_iter steps.
    """
    A = np.asarray(A, dtype=np.float64)
    n, m = A.shape
    if cfg.k > min(n, m):
        raise ValueError(f"k={cfg.k} exceeds min(n, m)={min(n, m)}")
    if cfg.init == "nndsvd":
        W, H = _nndsvd_init(A, cfg.k, cfg.denom_guard)
    else:
        rng = np.random.default_rng(cfg.seed)
        scale = np.sqrt(A.mean() / cfg.k) if A.mean() > 0 else 1.0
        W = rng.uniform(0.0, 1.0, (n, cfg.k)) * scale + cfg.denom_guard
        H = rng.uniform(0.0, 1.0, (cfg.k, m)) * scale + cfg.denom_guard
    trace = [objective(A, W, H)]
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        W, H = update_step(A, W, H, cfg.denom_guard)
        obj = objective(A, W, H)
        if not np.isfinite(obj):
            raise FloatingPointError("objective became non-finite")
        trace.append(obj)
        prev = trace[-2]
        if abs(prev - obj) < cfg.rel_tol * max(abs(prev), 1e-300):
            converged = True
            break
    # keep factors strictly positive so topic dimensions never collapse
    W = np.maximum(W, cfg.denom_guard)
    H = np.maximum(H, cfg.denom_guard)
    return NmfModel(W=W, H=H, objective_trace=trace, iterations=it, converged=converged)


def top_terms(H, topic, n_top, vocabulary=None):
    """Terms of one topic ranked by weight, ties broken by vocabulary order."""
    if not 0 <= topic < H.shape[0]:
        raise IndexError(f"topic {topic} out of range for {H.shape[0]} topics")
    if not 1 <= n_top <= H.shape[1]:
        raise ValueError(f"n_top must be in [1, {H.shape[1]}]")
    row = H[topic]
    order = np.lexsort((np.arange(len(row)), -row))[:n_top]
    if vocabulary is not None:
        return [vocabulary.terms[j] for j in order]
    return list(order)
