"""Heat semigroup exp(-t L_i) on i-cochains.

L_i is self-adjoint for the weighted inner product, so everything is done on
the symmetric conjugate S = W^{1/2} L_i W^{-1/2}. Small operators (at most
``DENSE_LIMIT`` faces) are diagonalized block by block over the connected
components of S; larger ones use shift-invert Lanczos for the spectral bottom
and a Krylov exponential for the semigroup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .complex import Face, WeightedComplex, face_label
from .operators import hodge_full

DENSE_LIMIT = 512
CLAMP_RTOL = 1e-10
_EPS = np.finfo(float).eps


class HeatEngineError(RuntimeError):
    pass


@dataclass
class HeatState:
    dim: int
    time: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("heat state values must be finite")


@dataclass
class SpectralData:
    dim: int
    lambda_min: float
    method: str
    residual: float = 0.0
    eigenvalues: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "lambda": self.lambda_min, "method": self.method, "residual": self.residual}


def _clamp(lam: float, scale: float) -> float:
    if abs(lam) <= CLAMP_RTOL * scale:
        return 0.0
    return lam


def expmv_lanczos(A, v: np.ndarray, t: float, m: int = 30, tol: float = 1e-13, max_steps: int = 100000):
    """exp(-t A) v for a symmetric matrix ``A`` by restarted Krylov time-stepping.

    Each step builds an orthonormal Krylov basis of dimension ``m`` (full
    reorthogonalization), then takes the largest substep whose a-posteriori
    error estimate stays within the per-unit-time share of ``tol``.
    """
    w = np.array(v, dtype=float)
    n = w.shape[0]
    if t == 0 or n == 0 or not np.any(w):
        return w
    anorm = float(abs(A).sum(axis=1).max()) if sp.issparse(A) else float(np.abs(A).sum(axis=1).max())
    m = max(1, min(m, n))
    done = 0.0
    tau = min(t, 10.0 / max(anorm, 1e-300))
    steps = 0
    while done < t:
        steps += 1
        if steps > max_steps:
            raise HeatEngineError("Krylov exponential did not finish within the step budget")
        beta = float(np.linalg.norm(w))
        if beta == 0.0:
            return w
        V = np.zeros((m + 1, n))
        H = np.zeros((m + 1, m))
        V[0] = w / beta
        k = m
        breakdown = False
        for j in range(m):
            p = A @ V[j]
            for _ in range(2):
                h = V[: j + 1] @ p
                p = p - V[: j + 1].T @ h
                H[: j + 1, j] += h
            hn = float(np.linalg.norm(p))
            H[j + 1, j] = hn
            if hn <= 1e-14 * max(anorm, 1.0):
                k = j + 1
                breakdown = True
                break
            V[j + 1] = p / hn
        Hk = H[:k, :k]
        Hk = 0.5 * (Hk + Hk.T)
        theta, Q = np.linalg.eigh(Hk)
        remaining = t - done
        if breakdown:
            tau = remaining
        tau = min(tau, remaining)
        while True:
            y = Q @ (np.exp(-tau * theta) * Q[0])
            err = 0.0 if breakdown else beta * H[k, k - 1] * abs(y[k - 1])
            # the estimate cannot drop below rounding in y, so never ask for less
            if err <= max(tol * tau / t, 16 * _EPS) * beta or tau <= 1e-300:
                break
            tau *= 0.5
        w = beta * (V[:k].T @ y)
        done += tau
        if not breakdown and err < 0.1 * max(tol * tau / t, 16 * _EPS) * beta:
            tau *= 2.0
    return w


class HeatSemigroup:
    """exp(-t L_i) for one complex and dimension, with cached factorizations."""

    def __init__(self, K: WeightedComplex, i: int, method: str = "auto"):
        if not 0 <= i <= K.dim:
            raise ValueError(f"dimension {i} out of range 0..{K.dim}")
        if method not in ("auto", "dense", "krylov"):
            raise ValueError(f"unknown method {method!r}")
        self.K = K
        self.dim = i
        self.faces = K.faces(i)
        self.n = len(self.faces)
        self.w = K.weights(i)
        self.sqrt_w = np.sqrt(self.w)
        self.L = hodge_full(K, i).tocsr()
        S = sp.diags(self.sqrt_w) @ self.L @ sp.diags(1.0 / self.sqrt_w)
        self.S = (0.5 * (S + S.T)).tocsr()
        self.norm = float(abs(self.S).sum(axis=1).max()) if self.n else 0.0
        if method == "auto":
            method = "dense" if self.n <= DENSE_LIMIT else "krylov"
        self.method = method
        self._blocks = None
        self._spectral = None

    def _factor(self):
        if self._blocks is None:
            ncomp, labels = connected_components(self.S, directed=False)
            blocks = []
            for c in range(ncomp):
                idx = np.flatnonzero(labels == c)
                theta, V = np.linalg.eigh(self.S[idx][:, idx].toarray())
                blocks.append((idx, theta, V))
            self._blocks = blocks
        return self._blocks

    def spectral(self) -> SpectralData:
        if self._spectral is None:
            self._spectral = self._spectral_dense() if self.n <= DENSE_LIMIT or self.method == "dense" else self._spectral_iterative()
        return self._spectral

    def _spectral_dense(self) -> SpectralData:
        if self.n == 0:
            return SpectralData(self.dim, 0.0, "dense", 0.0, np.zeros(0))
        evals = np.sort(np.concatenate([theta for _, theta, _ in self._factor()]))
        return SpectralData(self.dim, _clamp(float(evals[0]), self.norm), "dense", 0.0, evals)

    def _spectral_iterative(self) -> SpectralData:
        if self.n < 3:
            return self._spectral_dense()
        shift = -max(self.norm, 1.0) * 1e-2
        try:
            vals, vecs = eigsh(self.S, k=1, sigma=shift, which="LM", tol=1e-14)
        except ArpackNoConvergence as exc:
            raise HeatEngineError(f"spectral bottom did not converge: {exc}") from exc
        x = vecs[:, 0]
        lam = float(vals[0])
        residual = float(np.linalg.norm(self.S @ x - lam * x))
        if residual > 1e-8 * max(self.norm, 1.0):
            raise HeatEngineError(f"spectral bottom did not converge, residual {residual:.3e}")
        return SpectralData(self.dim, _clamp(lam, self.norm), "iterative", residual)

    def _expS(self, t: float, v: np.ndarray, method: str | None = None) -> np.ndarray:
        method = method or self.method
        if method == "krylov":
            return expmv_lanczos(self.S, v, t)
        out = np.zeros_like(v)
        for idx, theta, V in self._factor():
            vb = v[idx]
            if not np.any(vb):
                continue
            out[idx] = V @ (np.exp(-t * theta) * (V.T @ vb))
        return out

    def apply(self, t: float, f, method: str | None = None) -> np.ndarray:
        """exp(-t L_i) f."""
        f = np.asarray(f, dtype=float)
        if f.shape != (self.n,):
            raise ValueError(f"cochain must have length {self.n}")
        if not np.all(np.isfinite(f)):
            raise ValueError("initial data must be finite")
        if t < 0 or not math.isfinite(t):
            raise ValueError(f"time must be finite and nonnegative, got {t}")
        if t == 0:
            return f.copy()
        return self._expS(t, self.sqrt_w * f, method) / self.sqrt_w

    def kernel_column(self, t: float, face: Face, method: str | None = None) -> np.ndarray:
        """F -> p_t(F, face)."""
        if len(face) != self.dim + 1 or face not in self.K:
            raise ValueError(f"face {face_label(face)} is not a {self.dim}-face of the complex")
        k = self.K.index(face)
        e = np.zeros(self.n)
        e[k] = 1.0 / self.w[k]
        return self.apply(t, e, method)

    def kernel_matrix(self, t: float) -> np.ndarray:
        """Dense matrix of p_t(F, F'); exact zeros across components."""
        P = np.zeros((self.n, self.n))
        for idx, theta, V in self._factor():
            P[np.ix_(idx, idx)] = (V * np.exp(-t * theta)) @ V.T
        return P / np.outer(self.sqrt_w, self.sqrt_w)


def spectral_bottom(K: WeightedComplex, i: int, method: str = "auto") -> SpectralData:
    return HeatSemigroup(K, i, method).spectral()


def apply_semigroup(K: WeightedComplex, i: int, t: float, f: HeatState, method: str = "auto") -> HeatState:
    if f.dim != i:
        raise ValueError(f"state lives on {f.dim}-faces, not {i}-faces")
    return HeatState(i, f.time + t, HeatSemigroup(K, i, method).apply(t, f.values))


def heat_kernel_column(K: WeightedComplex, i: int, t: float, face: Face, method: str = "auto") -> HeatState:
    return HeatState(i, t, HeatSemigroup(K, i, method).kernel_column(t, face))


def energy_functional(K: WeightedComplex, i: int, state: HeatState, zeta_vals) -> float:
    """sum_F f(F)^2 exp(zeta(F)) w(F)."""
    z = np.asarray(zeta_vals, dtype=float)
    if z.shape != state.values.shape or not np.all(np.isfinite(z)):
        raise ValueError("zeta values must be finite and match the state length")
    return float(np.sum(state.values**2 * np.exp(z) * K.weights(i)))


def integrate_rk4(K: WeightedComplex, i: int, t: float, f, step_scale: float = 0.05) -> np.ndarray:
    """Classical RK4 for du/dt = -L_i u; a coarse cross-check, not a production path."""
    L = hodge_full(K, i).tocsr()
    u = np.asarray(f, dtype=float).copy()
    if t == 0:
        return u
    rate = float(abs(L).sum(axis=1).max()) if L.shape[0] else 0.0
    steps = max(1, math.ceil(t * rate / step_scale))
    h = t / steps
    for _ in range(steps):
        k1 = -(L @ u)
        k2 = -(L @ (u + 0.5 * h * k1))
        k3 = -(L @ (u + 0.5 * h * k2))
        k4 = -(L @ (u + h * k3))
        u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return u
