"""Points, subsets and functions over F_2^n, stored densely.

A point of F_2^n is an integer code in ``[0, 2**n)``; bit ``j`` of the code
is coordinate ``j`` (little-endian).  Addition is XOR.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from ._kernels import fwht, row_chunk, subset_xors
from .errors import DimensionMismatch, EmptySet, ResourceLimit

MAX_DIM = 24
# largest n for which the O(4^n) pair loops (difference_set) are allowed
MAX_PAIR_DIM = 13


def _check_dim(n: int, name: str = "dim") -> None:
    if not 0 <= n <= MAX_DIM:
        raise DimensionMismatch(f"{name}={n} outside [0, {MAX_DIM}]")


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointF2:
    dim: int
    code: int

    def __post_init__(self):
        _check_dim(self.dim)
        if not 0 <= self.code < (1 << self.dim):
            raise DimensionMismatch(f"code {self.code:#x} does not fit in dim {self.dim}")

    @classmethod
    def basis(cls, dim: int, j: int) -> "PointF2":
        return cls(dim, 1 << j)

    def __add__(self, other: "PointF2") -> "PointF2":
        if other.dim != self.dim:
            raise DimensionMismatch("points live in different spaces")
        return PointF2(self.dim, self.code ^ other.code)

    def bits(self) -> list[int]:
        return [(self.code >> j) & 1 for j in range(self.dim)]


def _code(y, dim: int) -> int:
    if isinstance(y, PointF2):
        if y.dim != dim:
            raise DimensionMismatch(f"point of dim {y.dim} used in dim {dim}")
        return y.code
    y = int(y)
    if not 0 <= y < (1 << dim):
        raise DimensionMismatch(f"code {y:#x} does not fit in dim {dim}")
    return y


@dataclass(frozen=True, eq=False)
class SubsetF2n:
    """Subset of F_2^n as a boolean membership vector of length 2**n."""

    dim: int
    members: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_dim(self.dim)
        m = np.asarray(self.members, dtype=bool)
        if m.shape != (1 << self.dim,):
            raise DimensionMismatch(f"membership vector must have length 2**{self.dim}")
        object.__setattr__(self, "members", _frozen(m.copy()))
        object.__setattr__(self, "_size", int(m.sum()))

    @classmethod
    def from_codes(cls, dim: int, codes) -> "SubsetF2n":
        _check_dim(dim)
        m = np.zeros(1 << dim, dtype=bool)
        codes = np.asarray(list(codes) if not isinstance(codes, np.ndarray) else codes, dtype=np.int64)
        if codes.size and (codes.min() < 0 or codes.max() >= (1 << dim)):
            raise DimensionMismatch(f"code out of range for dim {dim}")
        m[codes] = True
        return cls(dim, m)

    @classmethod
    def empty(cls, dim: int) -> "SubsetF2n":
        return cls(dim, np.zeros(1 << dim, dtype=bool))

    @property
    def size(self) -> int:
        return self._size

    def __len__(self) -> int:
        return self._size

    def codes(self) -> np.ndarray:
        return np.flatnonzero(self.members)

    def __contains__(self, y) -> bool:
        return bool(self.members[_code(y, self.dim)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubsetF2n)
            and other.dim == self.dim
            and np.array_equal(other.members, self.members)
        )

    def __hash__(self):
        return hash((self.dim, self.members.tobytes()))

    def __repr__(self) -> str:
        return f"SubsetF2n(dim={self.dim}, size={self.size})"

    def translate(self, y) -> "SubsetF2n":
        y = _code(y, self.dim)
        idx = np.arange(1 << self.dim) ^ y
        return SubsetF2n(self.dim, self.members[idx])

    def issubset(self, other: "SubsetF2n") -> bool:
        return not np.any(self.members & ~other.members)

    def __or__(self, other: "SubsetF2n") -> "SubsetF2n":
        return SubsetF2n(self.dim, self.members | other.members)

    def __and__(self, other: "SubsetF2n") -> "SubsetF2n":
        return SubsetF2n(self.dim, self.members & other.members)


@dataclass(frozen=True, eq=False)
class FnTable:
    """Truth table of f: F_2^n -> F_2^m; ``table[i]`` is f at the point with code i."""

    dom_dim: int
    codom_dim: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_dim(self.dom_dim, "dom_dim")
        _check_dim(self.codom_dim, "codom_dim")
        if self.codom_dim < 1:
            raise DimensionMismatch("codom_dim must be at least 1")
        t = np.asarray(self.table)
        if t.shape != (1 << self.dom_dim,):
            raise DimensionMismatch(f"table must have length 2**{self.dom_dim}")
        if t.size and (t.min() < 0 or int(t.max()) >= (1 << self.codom_dim)):
            raise DimensionMismatch(f"table entry does not fit in {self.codom_dim} bits")
        object.__setattr__(self, "table", _frozen(t.astype(np.int64)))

    @classmethod
    def from_function(cls, n: int, m: int, func) -> "FnTable":
        return cls(n, m, np.array([func(x) for x in range(1 << n)], dtype=np.int64))

    def __call__(self, x) -> int:
        return int(self.table[_code(x, self.dom_dim)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FnTable)
            and (other.dom_dim, other.codom_dim) == (self.dom_dim, self.codom_dim)
            and np.array_equal(other.table, self.table)
        )

    def __hash__(self):
        return hash((self.dom_dim, self.codom_dim, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"FnTable(n={self.dom_dim}, m={self.codom_dim})"

    def __add__(self, other: "FnTable") -> "FnTable":
        if (other.dom_dim, other.codom_dim) != (self.dom_dim, self.codom_dim):
            raise DimensionMismatch("tables have different shapes")
        return FnTable(self.dom_dim, self.codom_dim, self.table ^ other.table)

    def signs(self) -> np.ndarray:
        """(-1)**f as int64; only meaningful for m = 1."""
        return 1 - 2 * (self.table & 1)


@dataclass(frozen=True)
class SetStats:
    size: int
    sumset_size: int
    doubling: Fraction
    span_size: int
    ruzsa_log2: float
    ruzsa_bound: int | None
    greentao_exponent: Fraction


@dataclass(frozen=True)
class DiffSet:
    codom_dim: int
    values: frozenset

    @property
    def size(self) -> int:
        return len(self.values)

    def __contains__(self, c) -> bool:
        return int(c) in self.values


def _require_nonempty(S: SubsetF2n) -> None:
    if S.size == 0:
        raise EmptySet("operation requires a nonempty set")


def _pair_xor_members(codes_a: np.ndarray, codes_b: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros(1 << dim, dtype=bool)
    step = row_chunk(len(codes_b))
    for i in range(0, len(codes_a), step):
        out[np.bitwise_xor.outer(codes_a[i : i + step], codes_b).ravel()] = True
    return out


def sumset(S: SubsetF2n) -> SubsetF2n:
    """S + S = {a ^ b : a, b in S}."""
    _require_nonempty(S)
    codes = S.codes()
    if len(codes) ** 2 <= (1 << (S.dim + 4)):
        return SubsetF2n(S.dim, _pair_xor_members(codes, codes, S.dim))
    # dense sets: XOR self-convolution through the Walsh transform
    w = fwht(S.members.astype(np.float64))
    conv = fwht(w * w) / (1 << S.dim)
    return SubsetF2n(S.dim, conv > 0.5)


def basis(S: SubsetF2n) -> list[int]:
    """A basis of Span(S) made of elements of S, chosen by ascending code."""
    n = S.dim
    span_m = np.zeros(1 << n, dtype=bool)
    span_m[0] = True
    idx = np.arange(1 << n)
    out = []
    while True:
        outside = np.flatnonzero(S.members & ~span_m)
        if not outside.size:
            return out
        v = int(outside[0])
        out.append(v)
        span_m = span_m | span_m[idx ^ v]


def span(S: SubsetF2n) -> SubsetF2n:
    """Linear span over F_2.  The span of the empty set is {0}."""
    return span_of(S.dim, basis(S))


def span_of(dim: int, vectors) -> SubsetF2n:
    m = np.zeros(1 << dim, dtype=bool)
    m[[c for _, c in subset_xors(list(vectors))]] = True
    return SubsetF2n(dim, m)


def _ruzsa(K: Fraction, size: int, cap: int = 4096) -> tuple[float, int | None]:
    k4 = K**4
    log2 = 2 * math.log2(K) + float(k4) + math.log2(size)
    if k4 > cap:
        return log2, None
    import mpmath

    with mpmath.workprec(int(k4) + 2 * size.bit_length() + 128):
        val = mpmath.mpf(K.numerator) ** 2 / mpmath.mpf(K.denominator) ** 2
        val *= mpmath.power(2, mpmath.mpf(k4.numerator) / k4.denominator) * size
        return log2, int(mpmath.ceil(val))


def set_stats(S: SubsetF2n) -> SetStats:
    _require_nonempty(S)
    ss = sumset(S).size
    K = Fraction(ss, S.size)
    log2, bound = _ruzsa(K, S.size)
    return SetStats(
        size=S.size,
        sumset_size=ss,
        doubling=K,
        span_size=1 << len(basis(S)),
        ruzsa_log2=log2,
        ruzsa_bound=bound,
        greentao_exponent=2 * K,
    )


def is_affine_subspace(S: SubsetF2n) -> bool:
    """True iff S is a coset of a linear subspace."""
    if S.size == 0:
        return False
    s0 = int(S.codes()[0])
    T = S.translate(s0)
    return S.size & (S.size - 1) == 0 and span(T) == T


def hom_defect_rows(f: FnTable, xs: np.ndarray) -> np.ndarray:
    """Rows ``f(x^y) ^ f(x) ^ f(y)`` for x in `xs`, y over all of F_2^n."""
    t = f.table
    ys = np.arange(1 << f.dom_dim)
    return t[np.bitwise_xor.outer(xs, ys)] ^ t[xs][:, None] ^ t[None, :]


def difference_set(f: FnTable) -> DiffSet:
    """Delta f = {f(x+y) + f(x) + f(y)}; O(4^n) work."""
    n = f.dom_dim
    if n > MAX_PAIR_DIM:
        raise ResourceLimit("difference_set", MAX_PAIR_DIM)
    seen = np.zeros(1 << f.codom_dim, dtype=bool)
    N = 1 << n
    step = row_chunk(N)
    for lo in range(0, N, step):
        seen[hom_defect_rows(f, np.arange(lo, min(N, lo + step))).ravel()] = True
    return DiffSet(f.codom_dim, frozenset(int(c) for c in np.flatnonzero(seen)))


def derivative(f: FnTable, y) -> FnTable:
    """f_y(x) = f(x + y) + f(x)."""
    y = _code(y, f.dom_dim)
    idx = np.arange(1 << f.dom_dim) ^ y
    return FnTable(f.dom_dim, f.codom_dim, f.table[idx] ^ f.table)


def iterated_derivative(f: FnTable, ys) -> FnTable:
    ys = list(ys)
    if not ys:
        raise ValueError("need at least one direction")
    for y in ys:
        f = derivative(f, y)
    return f


def iterated_derivative_direct(f: FnTable, ys) -> FnTable:
    """The same derivative as the 2^d-term sum over subsets of directions."""
    codes = [_code(y, f.dom_dim) for y in ys]
    x = np.arange(1 << f.dom_dim)
    acc = np.zeros_like(f.table)
    for _, off in subset_xors(codes):
        acc ^= f.table[x ^ off]
    return FnTable(f.dom_dim, f.codom_dim, acc)
