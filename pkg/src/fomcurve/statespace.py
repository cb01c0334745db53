"""State-space form of the factor model: Kalman filter, smoother, and MLE.

The state is the demeaned factor vector x_t = f_t - mu with transition
x_{t+1} = A x_t + eta_t and measurement y_t = Z (x_t + mu) + e_t, where H is
diagonal measurement noise and Q the full state-shock covariance.  The
likelihood comes from the prediction-error decomposition, maximized by BFGS
over an unconstrained parameterization (log variances, Cholesky of Q).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import termstructure
from .optimize import minimize_bfgs
from .termstructure import FactorSeries

__all__ = [
    "StateSpaceModel",
    "KalmanOutput",
    "SmootherOutput",
    "kalman_filter",
    "kalman_smooth",
    "loglik",
    "mle_fit",
    "MleOptions",
]

_LOG2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class StateSpaceModel:
    Z: np.ndarray       # (N, 3) measurement loadings
    T_mat: np.ndarray   # (3, 3) transition
    mu: np.ndarray      # (3,) factor means
    H_diag: np.ndarray  # (N,) measurement variances
    Q: np.ndarray       # (3, 3) state covariance
    a0: np.ndarray      # (3,) initial factor mean (undemeaned)
    P0: np.ndarray      # (3, 3) initial state covariance
    lam: float = termstructure.DEFAULT_LAMBDA

    def __post_init__(self):
        if (self.H_diag <= 0).any():
            raise ValueError("measurement variances must be positive")
        if not np.allclose(self.Q, self.Q.T, atol=1e-10):
            raise ValueError("Q must be symmetric")

    @property
    def spectral_radius(self):
        return float(np.abs(np.linalg.eigvals(self.T_mat)).max())


@dataclass
class KalmanOutput:
    a_pred: np.ndarray   # (T, 3) predicted demeaned state means
    P_pred: np.ndarray   # (T, 3, 3)
    a_filt: np.ndarray   # (T, 3)
    P_filt: np.ndarray   # (T, 3, 3)
    v: np.ndarray        # (T, N) innovations
    F: np.ndarray        # (T, N, N) innovation covariances
    K: np.ndarray        # (T, 3, N) gains
    loglik: float


@dataclass
class SmootherOutput:
    alpha_hat: np.ndarray  # (T, 3) smoothed demeaned state means
    V: np.ndarray          # (T, 3, 3) smoothed state variances
    r: np.ndarray          # (T, 3) backward state cumulants (r_{t-1} at row t)
    N: np.ndarray          # (T, 3, 3)
    u: np.ndarray          # (T, N) smoothing errors
    D: np.ndarray          # (T, N, N)
    eps_hat: np.ndarray    # (T, N) smoothed measurement disturbances
    var_eps: np.ndarray    # (T, N, N)
    eta_hat: np.ndarray    # (T, 3) smoothed state disturbances
    var_eta: np.ndarray    # (T, 3, 3)


def _sym(M):
    return 0.5 * (M + M.T)


def kalman_filter(model, Y):
    """Forward recursion over the panel; aborts if any F_t is not PD."""
    Y = np.asarray(Y, dtype=np.float64)
    T, N = Y.shape
    if model.Z.shape[0] != N:
        raise ValueError("panel width does not match measurement loadings")
    Z, A = model.Z, model.T_mat
    H = np.diag(model.H_diag)
    d = Z @ model.mu
    a = model.a0 - model.mu
    P = _sym(model.P0)
    a_pred = np.empty((T, 3))
    P_pred = np.empty((T, 3, 3))
    a_filt = np.empty((T, 3))
    P_filt = np.empty((T, 3, 3))
    vs = np.empty((T, N))
    Fs = np.empty((T, N, N))
    Ks = np.empty((T, 3, N))
    ll = -0.5 * T * N * _LOG2PI
    for t in range(T):
        a_pred[t], P_pred[t] = a, P
        v = Y[t] - Z @ a - d
        F = _sym(Z @ P @ Z.T + H)
        try:
            cf = np.linalg.cholesky(F)
        except np.linalg.LinAlgError:
            raise FloatingPointError(f"innovation covariance not PD at step {t}")
        Finv_v = np.linalg.solve(F, v)
        PZt = P @ Z.T
        gain = PZt @ np.linalg.inv(F)
        af = a + gain @ v
        Pf = _sym(P - gain @ Z @ P)
        ll -= 0.5 * (2.0 * np.log(np.diag(cf)).sum() + v @ Finv_v)
        a_filt[t], P_filt[t] = af, Pf
        vs[t], Fs[t], Ks[t] = v, F, A @ gain
        a = A @ af
        P = _sym(A @ Pf @ A.T + model.Q)
    return KalmanOutput(a_pred=a_pred, P_pred=P_pred, a_filt=a_filt,
                        P_filt=P_filt, v=vs, F=Fs, K=Ks, loglik=float(ll))


def kalman_smooth(model, kf):
    """Backward recursion for smoothed states and disturbances."""
    T, N = kf.v.shape
    Z, A, Q = model.Z, model.T_mat, model.Q
    H = np.diag(model.H_diag)
    r = np.zeros(3)
    Nmat = np.zeros((3, 3))
    out = SmootherOutput(
        alpha_hat=np.empty((T, 3)), V=np.empty((T, 3, 3)),
        r=np.empty((T, 3)), N=np.empty((T, 3, 3)),
        u=np.empty((T, N)), D=np.empty((T, N, N)),
        eps_hat=np.empty((T, N)), var_eps=np.empty((T, N, N)),
        eta_hat=np.empty((T, 3)), var_eta=np.empty((T, 3, 3)),
    )
    for t in range(T - 1, -1, -1):
        F, v, K, P = kf.F[t], kf.v[t], kf.K[t], kf.P_pred[t]
        Finv = np.linalg.inv(F)
        L = A - K @ Z
        u = Finv @ v - K.T @ r
        D = _sym(Finv + K.T @ Nmat @ K)
        out.u[t], out.D[t] = u, D
        out.eps_hat[t] = np.diag(H) * u
        out.var_eps[t] = _sym(H - H @ D @ H)
        out.eta_hat[t] = Q @ r
        out.var_eta[t] = _sym(Q - Q @ Nmat @ Q)
        r = Z.T @ (Finv @ v) + L.T @ r
        Nmat = _sym(Z.T @ Finv @ Z + L.T @ Nmat @ L)
        out.r[t], out.N[t] = r, Nmat
        out.alpha_hat[t] = kf.a_pred[t] + P @ r
        out.V[t] = _sym(P - P @ Nmat @ P)
    return out


def loglik(model, Y):
    """Prediction-error-decomposition log likelihood of the panel."""
    return _loglik_fast(model, np.asarray(Y, dtype=np.float64))


def _loglik_fast(model, Y):
    # lean filter pass: once the predicted covariance reaches its steady
    # state, the gain and innovation covariance freeze and the remaining
    # recursion runs with precomputed pieces
    T, N = Y.shape
    Z, A, Q = model.Z, model.T_mat, model.Q
    H = np.diag(model.H_diag)
    d = Z @ model.mu
    a = model.a0 - model.mu
    P = _sym(model.P0)
    ll = -0.5 * T * N * _LOG2PI
    t = 0
    while t < T:
        F = _sym(Z @ P @ Z.T + H)
        try:
            cf = np.linalg.cholesky(F)
        except np.linalg.LinAlgError:
            raise FloatingPointError(f"innovation covariance not PD at step {t}")
        logdetF = 2.0 * np.log(np.diag(cf)).sum()
        Finv = np.linalg.inv(F)
        gain = P @ Z.T @ Finv
        P_next = _sym(A @ (P - gain @ Z @ P) @ A.T + Q)
        steady = np.abs(P_next - P).max() < 1e-12 * max(1.0, np.abs(P).max())
        v = Y[t] - Z @ a - d
        ll -= 0.5 * (logdetF + v @ Finv @ v)
        a = A @ (a + gain @ v)
        P = P_next
        t += 1
        if steady:
            break
    if t < T:
        # frozen-gain tail: a_{s+1} = G a_s + b_s with b precomputed in bulk
        G = A @ (np.eye(3) - gain @ Z)
        Yd = Y[t:] - d
        b = Yd @ (A @ gain).T
        rows = np.empty_like(Yd)
        for s in range(len(Yd)):
            rows[s] = Z @ a
            a = G @ a + b[s]
        V = Yd - rows
        ll -= 0.5 * (len(Yd) * logdetF + np.einsum("ti,ij,tj->", V, Finv, V))
    return float(ll)


@dataclass(frozen=True)
class MleOptions:
    estimate_lambda: bool = False
    max_iter: int = 200
    gtol: float = 1e-4
    rel_step: float = 1e-5


def _pack(A, mu, H_diag, Q, lam, estimate_lambda):
    cq = np.linalg.cholesky(Q)
    parts = [A.ravel(), mu, np.log(H_diag), cq[np.tril_indices(3)]]
    if estimate_lambda:
        parts.append([np.log(lam)])
    return np.concatenate(parts)


def _unpack(psi, N, estimate_lambda):
    A = psi[:9].reshape(3, 3)
    mu = psi[9:12]
    H_diag = np.exp(np.clip(psi[12:12 + N], -500.0, 500.0))
    cq = np.zeros((3, 3))
    cq[np.tril_indices(3)] = psi[12 + N:18 + N]
    Q = cq @ cq.T
    lam = float(np.exp(psi[18 + N])) if estimate_lambda else None
    return A, mu, H_diag, Q, lam


def mle_fit(panel, init=None, opts=MleOptions(), lam=termstructure.DEFAULT_LAMBDA):
    """Maximum-likelihood fit of the state-space model.

    init: optional (FactorSeries, Var1Fit) from two_step; computed if absent.
    The transition and means start at the VAR(1) estimates, all variances at
    1, and the initial state at the mean and residual covariance of the
    two-step factors.  Returns (model, KalmanOutput, SmootherOutput, result).
    """
    if init is None:
        init = termstructure.two_step(panel, lam)
    series, var1 = init
    N = len(panel.maturities)
    Z0 = termstructure.ns_loadings(panel.maturities, lam).Z
    a0 = series.values.mean(axis=0)
    P0 = var1.Q.copy()
    Y = panel.yields

    est_lam = opts.estimate_lambda
    psi0 = _pack(var1.A, var1.mu, np.ones(N), np.eye(3), lam, est_lam)

    def build(psi):
        A, mu, H_diag, Q, lam_psi = _unpack(psi, N, est_lam)
        lam_eff = lam_psi if est_lam else lam
        Z = termstructure.ns_loadings(panel.maturities, lam_eff).Z if est_lam else Z0
        return StateSpaceModel(Z=Z, T_mat=A, mu=mu, H_diag=H_diag, Q=_sym(Q),
                               a0=a0, P0=P0, lam=lam_eff)

    def neg_ll(psi):
        try:
            return -_loglik_fast(build(psi), Y)
        except (FloatingPointError, ValueError, np.linalg.LinAlgError):
            return np.inf

    result = minimize_bfgs(neg_ll, psi0, rel_step=opts.rel_step,
                           gtol=opts.gtol, max_iter=opts.max_iter)
    model = build(result.x)
    kf = kalman_filter(model, Y)
    sm = kalman_smooth(model, kf)
    return model, kf, sm, result


def factor_series(panel, model, kf=None, sm=None):
    """Filtered and smoothed factor series (state plus mean) for the panel."""
    if kf is None:
        kf = kalman_filter(model, panel.yields)
    if sm is None:
        sm = kalman_smooth(model, kf)
    filtered = FactorSeries(dates=panel.dates, values=kf.a_filt + model.mu,
                            source="filtered")
    smoothed = FactorSeries(dates=panel.dates, values=sm.alpha_hat + model.mu,
                            source="smoothed")
    return filtered, smoothed
