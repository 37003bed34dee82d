"""Zero-forcing and regularized zero-forcing with symbol-level normalization."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Channel, as_channel
from .errors import BadDimensions, BadParameter
from .linalg import hermitian_solve


@dataclass(frozen=True, eq=False)
class Beamformer:
    """Symbol-level beamformer for one symbol vector ``s``.

    ``x = W s`` is the transmitted vector; the rank-one matrix form is
    ``W = x s^H / K`` (unit-modulus ``s`` gives ``s^H s = K``).
    """

    x: np.ndarray
    s: np.ndarray
    p0: float

    @property
    def W(self) -> np.ndarray:
        return np.outer(self.x, self.s.conj()) / self.s.shape[0]

    @property
    def power(self) -> float:
        return float(np.vdot(self.x, self.x).real)


def _check_symbols(ch: Channel, s):
    s = np.asarray(s, dtype=complex)
    if s.shape[-1] != ch.K:
        raise BadDimensions(f"symbol vector has length {s.shape[-1]}, channel has K={ch.K}")
    return s


def zf_precode(H, s, p0=1.0):
    """ZF precoded vector scaled so that ``||x||^2 = p0``. Returns ``(Beamformer, f)``.

    ``f = sqrt(s^H (H H^H)^-1 s / p0)`` comes straight from the quadratic form.
    """
    ch = as_channel(H)
    s = _check_symbols(ch, s)
    y = ch.chol.solve(s)
    f = math.sqrt(np.vdot(s, y).real / p0)
    x = (ch.H.conj().T @ y) / f
    return Beamformer(x, s, p0), f


def rzf_precode(H, s, p0=1.0, rho=math.inf):
    """RZF with diagonal loading ``K / rho``; ``rho = inf`` is plain ZF."""
    if not rho > 0:
        raise BadParameter(f"rho must be positive, got {rho}")
    ch = as_channel(H)
    s = _check_symbols(ch, s)
    loading = ch.K / rho
    A = ch.gram + loading * np.eye(ch.K)
    x = ch.H.conj().T @ hermitian_solve(A, s)
    f = math.sqrt(np.vdot(x, x).real / p0)
    return Beamformer(x / f, s, p0)


def zf_batch(ch: Channel, S: np.ndarray, p0=1.0) -> np.ndarray:
    """ZF vectors for a stack of symbol vectors ``S`` (n, K) -> (n, N_t)."""
    Y = S @ ch.gram_inv.T
    f2 = np.einsum("nk,nk->n", S.conj(), Y).real / p0
    return (Y @ ch.H.conj()) / np.sqrt(f2)[:, None]


def rzf_batch(ch: Channel, S: np.ndarray, p0=1.0, rho=math.inf) -> np.ndarray:
    if not rho > 0:
        raise BadParameter(f"rho must be positive, got {rho}")
    A = ch.gram + (ch.K / rho) * np.eye(ch.K)
    X = hermitian_solve(A, S.T).T @ ch.H.conj()
    norms = np.sqrt(np.einsum("nt,nt->n", X.conj(), X).real / p0)
    return X / norms[:, None]
