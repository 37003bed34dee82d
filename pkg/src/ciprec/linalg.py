"""Small dense factor/solve helpers for Hermitian positive-definite systems.

Everything here is sized for K up to a few dozen users. Matrices are plain
numpy arrays; a :class:`Cholesky` keeps the lower factor so repeated solves
against the same matrix cost two triangular sweeps.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .errors import BadDimensions, NotPositiveDefinite

# pivot floor, relative to trace(A)/n
EPS_PD = 1e-12
# residual target for solves, relative to the right-hand side
EPS_SOLVE = 1e-10


@dataclass(frozen=True)
class Cholesky:
    lower: np.ndarray

    @property
    def n(self) -> int:
        return self.lower.shape[0]

    def solve(self, b: np.ndarray) -> np.ndarray:
        L = self.lower
        potrs = lapack.zpotrs if np.iscomplexobj(L) else lapack.dpotrs
        if np.iscomplexobj(b) and not np.iscomplexobj(L):
            return self.solve(b.real) + 1j * self.solve(b.imag)
        x, info = potrs(L, b, lower=1)
        if info != 0:
            raise ValueError(f"potrs failed with info={info}")
        return x


def cholesky(A: np.ndarray) -> Cholesky:
    """Factor a Hermitian positive-definite matrix, rejecting tiny pivots.

    Raises :class:`NotPositiveDefinite` if LAPACK refuses the matrix or any
    squared pivot is at or below ``EPS_PD * trace(A) / n``.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise BadDimensions(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    diag = np.diagonal(A).real
    floor = EPS_PD * float(diag.sum()) / n
    if not np.all(np.isfinite(A)):
        raise NotPositiveDefinite("matrix has non-finite entries")
    potrf = lapack.zpotrf if np.iscomplexobj(A) else lapack.dpotrf
    L, info = potrf(A, lower=1, clean=1)
    if info != 0:
        raise NotPositiveDefinite(f"factorization failed at column {info}")
    pivots = np.diagonal(L).real ** 2
    if not floor > 0 or pivots.min() <= floor:
        raise NotPositiveDefinite(
            f"pivot {pivots.min():.3e} at or below floor {floor:.3e}"
        )
    return Cholesky(L)


def hermitian_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve ``A X = B`` for Hermitian positive-definite ``A``."""
    return cholesky(A).solve(np.asarray(B))


def real_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``A x = b`` for real symmetric positive-definite ``A``."""
    A = np.asarray(A)
    if np.iscomplexobj(A):
        raise TypeError("real_solve expects a real matrix")
    return cholesky(A).solve(np.asarray(b, dtype=float))


def symmetrize(A: np.ndarray) -> np.ndarray:
    """Average with the (conjugate) transpose so symmetry holds exactly."""
    return 0.5 * (A + A.conj().T)


def gram(H: np.ndarray) -> np.ndarray:
    """``H H^H`` with exact conjugate symmetry."""
    H = np.asarray(H)
    if H.ndim != 2:
        raise BadDimensions(f"channel must be 2-D, got shape {H.shape}")
    return symmetrize(H @ H.conj().T)
