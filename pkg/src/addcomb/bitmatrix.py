"""Dense GF(2) matrices with rows packed into Python ints."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import parity
from .errors import DimensionMismatch


@dataclass(frozen=True)
class BitMatrix:
    """``rows x cols`` matrix over GF(2); ``data[i]`` bit ``j`` is entry (i, j)."""

    rows: int
    cols: int
    data: tuple

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise DimensionMismatch("matrix dimensions must be positive")
        data = tuple(int(r) for r in self.data)
        if len(data) != self.rows or any(not 0 <= r < (1 << self.cols) for r in data):
            raise DimensionMismatch("row data does not match the declared shape")
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_array(cls, a) -> "BitMatrix":
        a = np.asarray(a, dtype=np.int64) & 1
        weights = 1 << np.arange(a.shape[1], dtype=np.int64)
        return cls(a.shape[0], a.shape[1], tuple(int(r) for r in a @ weights))

    def to_array(self) -> np.ndarray:
        return np.array(
            [[(r >> j) & 1 for j in range(self.cols)] for r in self.data], dtype=np.uint8
        )

    def __getitem__(self, ij) -> int:
        i, j = ij
        return (self.data[i] >> j) & 1

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix.from_array(self.to_array().T)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch")
        return BitMatrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.data, other.data)))

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch("inner dimensions differ")
        return BitMatrix(self.rows, other.cols, tuple(other.left_apply(r) for r in self.data))

    def apply(self, v: int) -> int:
        """M v for a column vector v with `cols` bits; result has `rows` bits."""
        if not 0 <= v < (1 << self.cols):
            raise DimensionMismatch("vector does not fit")
        out = 0
        for i, r in enumerate(self.data):
            out |= (bin(r & v).count("1") & 1) << i
        return out

    def left_apply(self, x: int) -> int:
        """x^T M for a row vector x with `rows` bits; result has `cols` bits."""
        if not 0 <= x < (1 << self.rows):
            raise DimensionMismatch("vector does not fit")
        out = 0
        for i, r in enumerate(self.data):
            if (x >> i) & 1:
                out ^= r
        return out

    def apply_all(self) -> np.ndarray:
        """Table of M v for every v in F_2^cols."""
        v = np.arange(1 << self.cols, dtype=np.int64)
        out = np.zeros_like(v)
        for i, r in enumerate(self.data):
            out |= parity(v & r).astype(np.int64) << i
        return out

    def left_apply_all(self) -> np.ndarray:
        """Table of x^T M for every x in F_2^rows."""
        out = np.zeros(1, dtype=np.int64)
        for r in self.data:
            out = np.concatenate([out, out ^ r])
        return out

    def rank(self) -> int:
        return len(reduce_basis(self.data))


def reduce_basis(vectors) -> list[int]:
    """Row-echelon basis (distinct leading bits) of the span of `vectors`."""
    pivots: dict[int, int] = {}
    for v in vectors:
        v = int(v)
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                break
            v ^= pivots[top]
    return [pivots[k] for k in sorted(pivots, reverse=True)]
