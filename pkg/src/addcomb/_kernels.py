"""Vectorised butterflies and bit tricks used by several modules."""

from __future__ import annotations

import numpy as np


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis.

    Works for any integer or float dtype; integer input stays exact.  The
    last axis must have length 2**n.  Returns a new array.
    """
    a = np.array(a, copy=True)
    size = a.shape[-1]
    n = size.bit_length() - 1
    if 1 << n != size:
        raise ValueError("last axis length must be a power of two")
    lead = a.shape[:-1]
    h = 1
    for _ in range(n):
        v = a.reshape(*lead, size // (2 * h), 2, h)
        lo = v[..., 0, :].copy()
        hi = v[..., 1, :]
        v[..., 0, :] += hi
        lo -= hi
        v[..., 1, :] = lo
        h *= 2
    return a


def mobius(bits: np.ndarray) -> np.ndarray:
    """GF(2) Moebius transform (truth table <-> ANF) along the last axis.

    The transform is an involution.
    """
    a = np.array(bits, dtype=np.uint8, copy=True)
    size = a.shape[-1]
    n = size.bit_length() - 1
    lead = a.shape[:-1]
    h = 1
    for _ in range(n):
        v = a.reshape(*lead, size // (2 * h), 2, h)
        v[..., 1, :] ^= v[..., 0, :]
        h *= 2
    return a


_POP8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


def popcount(a: np.ndarray) -> np.ndarray:
    """Elementwise popcount for non-negative integers below 2**32."""
    a = np.asarray(a, dtype=np.uint64)
    out = np.zeros(a.shape, dtype=np.int64)
    for shift in (0, 8, 16, 24):
        out += _POP8[(a >> np.uint64(shift)) & np.uint64(0xFF)]
    return out


def parity(a: np.ndarray) -> np.ndarray:
    return (popcount(a) & 1).astype(np.uint8)


def subset_xors(vectors) -> list[tuple[int, int]]:
    """All (mask, xor) pairs for subsets of `vectors`, mask bit i <-> vectors[i]."""
    out = [(0, 0)]
    for i, v in enumerate(vectors):
        out += [(mask | (1 << i), acc ^ v) for mask, acc in out]
    return sorted(out)


def row_chunk(width: int, budget: int = 1 << 22) -> int:
    """Number of rows of length `width` that fit a temporary of `budget` cells."""
    return max(1, budget // max(1, width))
