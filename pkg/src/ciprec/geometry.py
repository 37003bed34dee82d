"""Per-symbol constructive-interference quantities and beamformer reconstruction.

For a channel ``H`` and symbol vector ``s`` the strict kernel is built from

    T = diag(s^H) (H H^H)^-1 diag(s),   V = Re(T),
    a = V 1,   c = 1^T V 1,   G = V - a a^T / c,

and the dual problem is ``min u^T V^-1 u`` over the probability simplex.
The non-strict kernel replaces ``V`` by the 2K x 2K matrix
``V_hat = S^-T T_hat S^-1`` where ``T_hat`` is the real representation of
``T`` and ``S`` stacks the two half-plane constraints bounding each
constructive sector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .channel import Channel, as_channel
from .errors import BadDimensions, DegenerateDual, UnsupportedModulation
from .linalg import Cholesky, cholesky, symmetrize
from .zf import Beamformer

STRICT = "strict"
NONSTRICT = "non-strict"

# tolerance on |s_k| = 1 and on 1^T u = 1
_UNIT_TOL = 1e-9
# below this u^T V^-1 u the dual carries no direction
_EPS_DEGENERATE = 1e-14


def real_rep(Z: np.ndarray) -> np.ndarray:
    """Real 2n x 2n representation ``[[Re, -Im], [Im, Re]]`` of a complex matrix."""
    n = Z.shape[0]
    out = np.empty((2 * n, 2 * n))
    out[:n, :n] = out[n:, n:] = Z.real
    out[:n, n:] = -Z.imag
    out[n:, :n] = Z.imag
    return out


def _two_by_two_blocks(p, q, r, s, K):
    out = np.zeros((2 * K, 2 * K))
    i = np.arange(K)
    out[i, i], out[i, K + i], out[K + i, i], out[K + i, K + i] = p, q, r, s
    return out


def sector_matrix(theta_t: float, K: int) -> np.ndarray:
    """``S = [[I, -I/tan], [I, I/tan]]``: row k gives ``Re - Im/tan``, row K+k ``Re + Im/tan``."""
    cot = 1.0 / math.tan(theta_t)
    return _two_by_two_blocks(1.0, -cot, 1.0, cot, K)


def sector_matrix_inv(theta_t: float, K: int) -> np.ndarray:
    tn = math.tan(theta_t)
    return _two_by_two_blocks(0.5, 0.5, -0.5 * tn, 0.5 * tn, K)


@dataclass(frozen=True, eq=False)
class CiKernel:
    mode: str
    channel: Channel = field(repr=False)
    s: np.ndarray = field(repr=False)
    p0: float
    T: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    c: float
    G: np.ndarray = field(repr=False)
    chol: Cholesky = field(repr=False)
    theta_t: float | None = None
    S: np.ndarray | None = field(default=None, repr=False)
    T_hat: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def K(self) -> int:
        return self.s.shape[0]

    @property
    def strict(self) -> bool:
        return self.mode == STRICT

    @cached_property
    def zf_u(self) -> np.ndarray:
        """The dual point ``a / c`` that reproduces zero forcing."""
        return self.a / self.c

    @cached_property
    def _T_inv(self) -> np.ndarray:
        # T^-1 = diag(s^H) H H^H diag(s) because diag(s) is unitary
        s = self.s
        return s.conj()[:, None] * self.channel.gram * s[None, :]

    @cached_property
    def V_inv(self) -> np.ndarray:
        """The quadratic form of the dual problem, materialized."""
        if self.strict:
            return symmetrize(self.chol.solve(np.eye(self.n)))
        return symmetrize(self.S @ real_rep(self._T_inv) @ self.S.T)

    def apply_V_inv(self, u: np.ndarray) -> np.ndarray:
        return self.scaling_direction(u)[1]

    def scaling_direction(self, u: np.ndarray):
        """Unnormalized complex scaling vector for dual point ``u`` and ``V^-1 u``.

        Strict: ``Lambda ~ V^-1 u``. Non-strict: ``Lambda_hat ~ T_hat^-1 S^T u``,
        mapped to complex form, with ``V_hat^-1 u = S Lambda_hat``.
        """
        u = np.asarray(u, dtype=float)
        K = self.K
        if u is self.zf_u or np.array_equal(u, self.zf_u):
            # V^-1 a = 1 exactly; for the hatted system T_hat^-1 S^T a_hat = S^-1 1 = [1; 0]
            return np.full(K, 1.0 / self.c, dtype=complex), np.full(self.n, 1.0 / self.c)
        if self.strict:
            v = self.chol.solve(u)
            return v.astype(complex), v
        y = self.S.T @ u
        lam = self._T_inv @ (y[:K] + 1j * y[K:])
        return lam, self.S @ np.concatenate([lam.real, lam.imag])

    def margins(self, Lam: np.ndarray) -> np.ndarray:
        """Per-constraint distances to the detection thresholds (t <= margins)."""
        if self.strict:
            return Lam.real
        cot = 1.0 / math.tan(self.theta_t)
        return np.concatenate([Lam.real - cot * Lam.imag, Lam.real + cot * Lam.imag])

    def objective(self, u: np.ndarray) -> float:
        return float(u @ self.apply_V_inv(u))


def _prepare(H, s):
    ch = as_channel(H)
    s = np.asarray(s, dtype=complex)
    if s.shape != (ch.K,):
        raise BadDimensions(f"symbol vector has shape {s.shape}, expected ({ch.K},)")
    if np.abs(np.abs(s) - 1).max() > _UNIT_TOL:
        raise BadDimensions("symbols must have unit modulus")
    C = ch.gram_inv
    T = symmetrize(s.conj()[:, None] * C * s[None, :])
    return ch, s, T


def _dual_terms(V):
    a = V.sum(axis=1)
    c = float(a.sum())
    G = symmetrize(V - np.outer(a, a) / c)
    return a, c, G


def build_kernel_strict(H, s, p0=1.0) -> CiKernel:
    ch, s, T = _prepare(H, s)
    V = symmetrize(T.real)
    chol = cholesky(V)
    a, c, G = _dual_terms(V)
    return CiKernel(STRICT, ch, s, p0, T, V, a, c, G, chol)


def build_kernel_nonstrict(H, s, p0=1.0, theta_t=math.pi / 4) -> CiKernel:
    if not 0 < theta_t < math.pi / 2 - 1e-12:
        raise UnsupportedModulation(
            f"non-strict rotation needs 0 < theta_t < pi/2 (M >= 4), got {theta_t}"
        )
    ch, s, T = _prepare(H, s)
    K = ch.K
    T_hat = real_rep(T)
    S = sector_matrix(theta_t, K)
    S_inv = sector_matrix_inv(theta_t, K)
    V = symmetrize(S_inv.T @ T_hat @ S_inv)
    chol = cholesky(V)
    a, c, G = _dual_terms(V)
    return CiKernel(NONSTRICT, ch, s, p0, T, V, a, c, G, chol, theta_t, S, T_hat)


def build_kernel(H, s, p0=1.0, mode=STRICT, theta_t=None) -> CiKernel:
    if mode == STRICT:
        return build_kernel_strict(H, s, p0)
    if mode == NONSTRICT:
        if theta_t is None:
            raise UnsupportedModulation("non-strict mode needs theta_t")
        return build_kernel_nonstrict(H, s, p0, theta_t)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True, eq=False)
class DualSolution:
    u: np.ndarray
    q: np.ndarray
    alpha0: float
    Lambda: np.ndarray
    t_star: float
    objective: float


def beamformer_from_dual(kernel: CiKernel, u, p0=None):
    """Closed-form beamformer for dual point ``u``. Returns ``(Beamformer, DualSolution)``.

    ``u`` must satisfy ``1^T u = 1``. Entries may be negative: intermediate
    iterates of the closed-form scheme still give a beamformer meeting the
    power budget, only with a smaller margin.

    The scaling vector is normalized through ``||x||`` rather than through
    ``sqrt(p0 / u^T V^-1 u)``; the two agree analytically and the former
    makes the power constraint exact in floating point.
    """
    p0 = kernel.p0 if p0 is None else p0
    u = np.asarray(u, dtype=float)
    if u.shape != (kernel.n,):
        raise BadDimensions(f"dual point has shape {u.shape}, expected ({kernel.n},)")
    if abs(u.sum() - 1) > _UNIT_TOL:
        raise DegenerateDual(f"dual point must sum to 1, got {u.sum()!r}")
    lam, vinv_u = kernel.scaling_direction(u)
    Q = float(u @ vinv_u)
    if not Q > _EPS_DEGENERATE:
        raise DegenerateDual(f"u^T V^-1 u = {Q:.3e}")
    x_raw = kernel.channel.zf_matrix @ (lam * kernel.s)
    scale = math.sqrt(p0) / np.linalg.norm(x_raw)
    Lam = scale * lam
    if kernel.strict:
        Lam = Lam.real.astype(complex)
    q = 2 * (vinv_u - vinv_u.min())
    dual = DualSolution(
        u=u,
        q=q,
        alpha0=math.sqrt(Q / (4 * p0)),
        Lambda=Lam,
        t_star=float(kernel.margins(Lam).min()),
        objective=Q,
    )
    return Beamformer(scale * x_raw, kernel.s, p0), dual


def kkt_residuals(dual: DualSolution) -> dict:
    """Simplex, sign and complementary-slackness residuals of a dual solution."""
    u, q = dual.u, dual.q
    return {
        "simplex": abs(u.sum() - 1),
        "u_min": float(u.min()),
        "q_min": float(q.min()),
        "slackness": float(np.abs(u * q).max()),
    }
