"""PSK constellations, Rayleigh channels, AWGN and phase-sector detection.

Bit labels are Gray coded and packed most-significant-bit first: the label of
a symbol is ``sum(bits[i] << (m - 1 - i))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadDimensions, UnsupportedOrder

SUPPORTED_ORDERS = (2, 4, 8, 16)
MOD_NAMES = {"bpsk": 2, "qpsk": 4, "8psk": 8, "16psk": 16}


def gray_code(m):
    return m ^ (m >> 1)


@dataclass(frozen=True)
class Constellation:
    order: int
    points: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)  # labels[index] -> Gray label
    index_of_label: np.ndarray = field(repr=False)

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.order))

    @property
    def threshold_angle(self) -> float:
        return math.pi / self.order

    @property
    def offset(self) -> float:
        """Phase of point 0. BPSK sits on the real axis, higher orders are
        rotated by half a sector so QPSK contains (1 + j)/sqrt(2)."""
        return 0.0 if self.order == 2 else math.pi / self.order

    def bits_of(self, index: np.ndarray) -> np.ndarray:
        """Gray bit labels (MSB first) of point indices; shape (..., m)."""
        lab = self.labels[np.asarray(index)]
        shifts = np.arange(self.bits_per_symbol - 1, -1, -1)
        return ((lab[..., None] >> shifts) & 1).astype(np.int8)

    def index_of_bits(self, bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64)
        if bits.shape[-1] != self.bits_per_symbol:
            raise BadDimensions(
                f"expected {self.bits_per_symbol} bits per symbol, got {bits.shape[-1]}"
            )
        weights = 1 << np.arange(self.bits_per_symbol - 1, -1, -1)
        return self.index_of_label[bits @ weights]

    def modulate(self, bits: np.ndarray) -> np.ndarray:
        return self.points[self.index_of_bits(bits)]

    def sector(self, r: np.ndarray) -> np.ndarray:
        """Index of the decision sector each sample falls in (phase only)."""
        M = self.order
        ang = np.angle(r) - self.offset + math.pi / M
        return np.floor(ang * (M / (2 * math.pi))).astype(np.int64) % M


def make_constellation(M: int) -> Constellation:
    if M not in SUPPORTED_ORDERS:
        raise UnsupportedOrder(f"PSK order must be one of {SUPPORTED_ORDERS}, got {M}")
    offset = 0.0 if M == 2 else math.pi / M
    idx = np.arange(M)
    points = np.exp(1j * (offset + 2 * math.pi * idx / M))
    labels = gray_code(idx)
    index_of_label = np.empty(M, dtype=np.int64)
    index_of_label[labels] = idx
    for arr in (points, labels, index_of_label):
        arr.setflags(write=False)
    return Constellation(M, points, labels, index_of_label)


def constellation_by_name(name: str) -> Constellation:
    try:
        return make_constellation(MOD_NAMES[name.lower()])
    except KeyError:
        raise UnsupportedOrder(f"unknown modulation {name!r}; expected one of {sorted(MOD_NAMES)}") from None


def complex_normal(rng: np.random.Generator, shape, variance=1.0) -> np.ndarray:
    """Circularly-symmetric Gaussian samples, ``variance`` split evenly between
    real and imaginary parts."""
    scale = math.sqrt(variance / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channel(K: int, Nt: int, rng: np.random.Generator) -> np.ndarray:
    """K x Nt i.i.d. CN(0, 1) flat Rayleigh channel."""
    if K < 1 or K > Nt:
        raise BadDimensions(f"need 1 <= K <= N_t, got K={K}, N_t={Nt}")
    return complex_normal(rng, (K, Nt))


def sample_symbols(const: Constellation, K: int, rng: np.random.Generator, count=None):
    """Draw random source bits and map them. Returns ``(s, bits)``.

    With ``count`` set, ``s`` has shape (count, K) and bits (count, K, m).
    """
    shape = (K,) if count is None else (count, K)
    bits = rng.integers(0, 2, size=shape + (const.bits_per_symbol,), dtype=np.int8)
    return const.modulate(bits), bits


def transmit(x_or_W, s, H, sigma2, rng=None) -> np.ndarray:
    """Received samples ``r = H W s + n`` with ``n ~ CN(0, sigma2 I)``.

    ``x_or_W`` is either the precoded vector (length N_t) or an N_t x K matrix.
    """
    H = np.asarray(H)
    x = np.asarray(x_or_W)
    if x.ndim == 2:
        if x.shape != (H.shape[1], H.shape[0]):
            raise BadDimensions(f"W has shape {x.shape}, channel {H.shape}")
        x = x @ np.asarray(s)
    if x.shape != (H.shape[1],):
        raise BadDimensions(f"precoded vector has shape {x.shape}, channel {H.shape}")
    if sigma2 < 0:
        raise BadDimensions("noise variance must be non-negative")
    r = H @ x
    if sigma2 > 0:
        r = r + complex_normal(rng, r.shape, sigma2)
    return r


def detect(r, const: Constellation):
    """Phase-sector decision. Returns ``(symbols, bits)``."""
    idx = const.sector(np.asarray(r))
    return const.points[idx], const.bits_of(idx)
