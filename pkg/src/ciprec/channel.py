from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BadDimensions
from .linalg import Cholesky, cholesky, gram, symmetrize


@dataclass(frozen=True, eq=False)
class Channel:
    """A channel realization with the per-channel quantities every precoder
    reuses: the Gram matrix, its factor, its inverse and ``H^H (H H^H)^-1``.

    Build once per realization and share across all symbol vectors.
    """

    H: np.ndarray
    gram: np.ndarray
    chol: Cholesky

    @classmethod
    def from_matrix(cls, H) -> "Channel":
        H = np.asarray(H, dtype=complex)
        if H.ndim != 2 or H.shape[0] > H.shape[1]:
            raise BadDimensions(f"need a K x N_t channel with K <= N_t, got {H.shape}")
        if not np.all(np.isfinite(H)):
            raise BadDimensions("channel has non-finite entries")
        G = gram(H)
        return cls(H, G, cholesky(G))

    @property
    def K(self) -> int:
        return self.H.shape[0]

    @property
    def Nt(self) -> int:
        return self.H.shape[1]

    @cached_property
    def gram_inv(self) -> np.ndarray:
        return symmetrize(self.chol.solve(np.eye(self.K, dtype=complex)))

    @cached_property
    def zf_matrix(self) -> np.ndarray:
        return self.H.conj().T @ self.gram_inv


def as_channel(H) -> Channel:
    return H if isinstance(H, Channel) else Channel.from_matrix(H)
