"""From a small difference set to a linear map with a small error image.

Pipeline for f: F_2^n -> F_2^m with K = |Delta f|:

1. lift to F(x, z) = <f(x), z> and check ||F||_{U^3}^8 >= K^-7;
2. find a quadratic Q close to F (exhaustive search, N = n + m <= 6);
3. read the bilinear part A of Q, set l(x) = x^T A and pick the most common
   value c of f(x) + l(x);
4. cover F_2^n greedily with disjoint translates of T = {f = l + c} and
   bound the error image {f(x) + l(x)} by K^2 / eps.

Point codes on F_2^{n+m} put x in the low n bits and z in the high m bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import json
import math

import numpy as np

from ._kernels import fwht, parity, row_chunk, subset_xors
from .bitmatrix import BitMatrix
from .checks import Bound, bound
from .errors import DegenerateAgreement, DimensionMismatch, FormatError, ResourceLimit
from .gf2core import MAX_DIM, DiffSet, FnTable, SubsetF2n, difference_set, sumset
from .gowers import gowers_power_exact

MAX_QUAD_DIM = 6
MAX_TUPLE_BITS = 28  # exact loops over 2^(n(k+1)) tuples


@dataclass(frozen=True)
class QuadraticForm:
    """sum_{i<j} quad_ij v_i v_j + <lin, v> + const_bit over F_2.

    ``quad[i]`` packs row i of the strictly upper-triangular coefficient
    matrix (bit j set means the monomial v_i v_j is present, j > i).
    """

    dim: int
    quad: tuple
    lin: int = 0
    const_bit: int = 0

    def __post_init__(self):
        quad = tuple(int(r) for r in self.quad)
        if len(quad) != self.dim:
            raise DimensionMismatch("quad must have one row per variable")
        for i, r in enumerate(quad):
            if r >> self.dim or r & ((1 << (i + 1)) - 1):
                raise DimensionMismatch(f"row {i} is not strictly upper triangular")
        if not 0 <= self.lin < (1 << self.dim) or self.const_bit not in (0, 1):
            raise DimensionMismatch("linear part or constant out of range")
        object.__setattr__(self, "quad", quad)

    @staticmethod
    def pairs(dim: int) -> list[tuple[int, int]]:
        return list(itertools.combinations(range(dim), 2))

    @classmethod
    def from_encoding(cls, dim: int, quad_code: int, lin: int = 0, const_bit: int = 0):
        quad = [0] * dim
        for p, (i, j) in enumerate(cls.pairs(dim)):
            if (quad_code >> p) & 1:
                quad[i] |= 1 << j
        return cls(dim, tuple(quad), lin, const_bit)

    def encoding(self) -> tuple[int, int, int]:
        """(quad_code, lin, const_bit); quad bit p is the p-th pair (i<j) in lexicographic order."""
        code = 0
        for p, (i, j) in enumerate(self.pairs(self.dim)):
            code |= ((self.quad[i] >> j) & 1) << p
        return code, self.lin, self.const_bit

    def __call__(self, v: int) -> int:
        acc = self.const_bit ^ (bin(v & self.lin).count("1") & 1)
        for i, r in enumerate(self.quad):
            if (v >> i) & 1:
                acc ^= bin(v & r).count("1") & 1
        return acc

    def table(self) -> np.ndarray:
        v = np.arange(1 << self.dim, dtype=np.int64)
        acc = parity(v & self.lin).astype(np.int64) ^ self.const_bit
        for i, r in enumerate(self.quad):
            if r:
                acc ^= ((v >> i) & 1) & parity(v & r)
        return acc

    def to_fn(self) -> FnTable:
        return FnTable(self.dim, 1, self.table())

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "quad": [format(r, "x") for r in self.quad],
            "lin": format(self.lin, "x"),
            "const": self.const_bit,
        }

    @classmethod
    def from_json(cls, obj) -> "QuadraticForm":
        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        try:
            return cls(
                int(obj["dim"]),
                tuple(int(r, 16) for r in obj["quad"]),
                int(obj["lin"], 16),
                int(obj["const"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad quadratic form JSON: {exc}") from None


def lift_inner_product(f: FnTable) -> FnTable:
    """F(x, z) = <f(x), z> on F_2^{n+m}; x in the low bits."""
    n, m = f.dom_dim, f.codom_dim
    if n + m > MAX_DIM:
        raise DimensionMismatch(f"n + m = {n + m} exceeds {MAX_DIM}")
    z = np.arange(1 << m, dtype=np.int64)
    F = parity(np.bitwise_and.outer(z, f.table)).astype(np.int64)  # row z, column x
    return FnTable(n + m, 1, F.ravel())


def _tuple_budget(what: str, n: int, arity: int) -> None:
    if n * arity > MAX_TUPLE_BITS:
        raise ResourceLimit(what, MAX_TUPLE_BITS // arity, f"n={n}")


def a_values(f: FnTable, x, y1, y2, y3):
    """(A0, A1, A2, A3) for a tuple (or broadcastable arrays) of points."""
    t = f.table
    a0 = t[x] ^ t[x ^ y1] ^ t[x ^ y2] ^ t[x ^ y3]
    a0 = a0 ^ t[x ^ y1 ^ y2] ^ t[x ^ y1 ^ y3] ^ t[x ^ y2 ^ y3] ^ t[x ^ y1 ^ y2 ^ y3]
    a1 = t[x ^ y1] ^ t[x ^ y1 ^ y2] ^ t[x ^ y1 ^ y3] ^ t[x ^ y1 ^ y2 ^ y3]
    a2 = t[x ^ y2] ^ t[x ^ y2 ^ y1] ^ t[x ^ y2 ^ y3] ^ t[x ^ y2 ^ y1 ^ y3]
    a3 = t[x ^ y3] ^ t[x ^ y3 ^ y1] ^ t[x ^ y3 ^ y2] ^ t[x ^ y3 ^ y1 ^ y2]
    return a0, a1, a2, a3


def a_system_probability(f: FnTable) -> Fraction:
    """Pr over (x, y1, y2, y3) that A0 = A1 = A2 = A3 = 0, exactly."""
    n = f.dom_dim
    _tuple_budget("a_system_probability", n, 4)
    N = 1 << n
    y2, y3, x = np.meshgrid(np.arange(N), np.arange(N), np.arange(N), indexing="ij")
    count = 0
    for y1 in range(N):
        a0, a1, a2, a3 = a_values(f, x, y1, y2, y3)
        count += int(np.count_nonzero((a0 | a1 | a2 | a3) == 0))
    return Fraction(count, 1 << (4 * n))


def _tuple_rows(n: int, k: int, lo: int, hi: int) -> np.ndarray:
    """Rows lo..hi of the enumeration of (y_1..y_k); y_i = bits [n i, n(i+1)) of the row index."""
    r = np.arange(lo, hi, dtype=np.int64)
    mask = (1 << n) - 1
    return np.stack([(r >> (n * i)) & mask for i in range(k)], axis=1) if k else r[:, None][:, :0]


def level_mask_rows(f: FnTable, shifts, ys: np.ndarray) -> np.ndarray:
    """Membership of (x, ys[r]) in S_k for every x; shape (len(ys), 2^n)."""
    t = f.table
    k = len(shifts)
    x = np.arange(1 << f.dom_dim)
    ok = np.ones((ys.shape[0], x.size), dtype=bool)
    for mask, _ in subset_xors([0] * k):
        if not mask:
            continue
        off = np.zeros(ys.shape[0], dtype=np.int64)
        rhs = np.zeros(ys.shape[0], dtype=np.int64)
        for i in range(k):
            if (mask >> i) & 1:
                off ^= ys[:, i]
                rhs ^= t[ys[:, i]] ^ int(shifts[i])
        ok &= t[np.bitwise_xor.outer(off, x)] == (t[None, :] ^ rhs[:, None])
    return ok


@dataclass(frozen=True)
class LevelStep:
    level: int  # k + 1
    shift: int  # c_{k+1}
    density_prev: Fraction  # |S_k| / 2^{n(k+1)}
    density_doubled: Fraction  # |S'| / 2^{n(k+2)}
    density: Fraction  # |S_{k+1}| / 2^{n(k+2)}


@dataclass(frozen=True, eq=False)
class LevelChain:
    """Shifts c_1..c_k and the exact density of the tuple set S_k.

    S_k itself is never stored; `contains` and `count_members` evaluate the
    defining identities on demand.
    """

    f: FnTable = field(repr=False)
    k: int
    shifts: tuple
    density: Fraction
    steps: tuple = field(repr=False, default=())

    def contains(self, x: int, ys) -> bool:
        ys = [int(y) for y in ys]
        if len(ys) != self.k:
            raise DimensionMismatch(f"expected {self.k} directions")
        t = self.f.table
        for mask, _ in subset_xors([0] * self.k):
            off, rhs = x, int(t[x])
            for i in range(self.k):
                if (mask >> i) & 1:
                    off ^= ys[i]
                    rhs ^= int(t[ys[i]]) ^ self.shifts[i]
            if int(t[off]) != rhs:
                return False
        return True

    def count_members(self) -> int:
        """|S_k| by direct evaluation of the defining predicate."""
        n = self.f.dom_dim
        _tuple_budget("LevelChain.count_members", n, self.k + 1)
        total = 1 << (n * self.k)
        step = row_chunk(1 << n)
        count = 0
        for lo in range(0, total, step):
            ys = _tuple_rows(n, self.k, lo, min(total, lo + step))
            count += int(np.count_nonzero(level_mask_rows(self.f, self.shifts, ys)))
        return count

    def lower_bound(self, k_delta: int) -> Fraction:
        return Fraction(1, k_delta ** ((1 << self.k) - 1))


def build_level_chain(f: FnTable, k: int) -> LevelChain:
    """Greedy shifts c_1..c_k, one induction step at a time.

    At each step the doubled set S' = {(x, ys, y): (x, ys), (x + y, ys) in S_k}
    is counted through the Gram matrix G[x, x'] = #{ys : x, x' both fibre
    members}, and c_{k+1} is the most frequent value of
    f(x + y) + f(x) + f(y) over S' (smallest code on ties).
    """
    if k < 1:
        raise ValueError("level must be >= 1")
    n, N = f.dom_dim, 1 << f.dom_dim
    _tuple_budget("build_level_chain", n, k + 1)
    t = f.table
    xs = np.arange(N)
    defect = t[np.bitwise_xor.outer(xs, xs)] ^ t[:, None] ^ t[None, :]
    shifts: list[int] = []
    steps = []
    density = Fraction(1)
    for level in range(k):
        total = 1 << (n * level)
        gram = np.zeros((N, N), dtype=np.float64)
        step = row_chunk(N)
        for lo in range(0, total, step):
            ys = _tuple_rows(n, level, lo, min(total, lo + step))
            rows = level_mask_rows(f, shifts, ys).astype(np.float64)
            gram += rows.T @ rows
        gram_i = np.rint(gram).astype(np.int64)
        hist = np.bincount(defect.ravel(), weights=gram_i.ravel(), minlength=1 << f.codom_dim)
        hist = np.rint(hist).astype(np.int64)
        c = int(np.argmax(hist))
        denom = 1 << (n * (level + 2))
        new_density = Fraction(int(hist[c]), denom)
        steps.append(
            LevelStep(level + 1, c, density, Fraction(int(gram_i.sum()), denom), new_density)
        )
        shifts.append(c)
        density = new_density
    return LevelChain(f, k, tuple(shifts), density, tuple(steps))


def best_quadratic_exhaustive(g: FnTable) -> tuple[QuadraticForm, Fraction]:
    """Quadratic polynomial maximising Pr_v[g(v) = Q(v)] over all of them.

    For each quadratic part the best affine completion is read off a Walsh
    transform, so the search is over 2^{N(N-1)/2} tables.  Ties go to the
    smallest (quad_code, lin, const_bit).
    """
    if g.codom_dim != 1:
        raise DimensionMismatch("exhaustive quadratic search needs m=1")
    N = g.dom_dim
    if N > MAX_QUAD_DIM:
        raise ResourceLimit("best_quadratic_exhaustive", MAX_QUAD_DIM, f"N={N} > {MAX_QUAD_DIM}")
    v = np.arange(1 << N, dtype=np.int64)
    pairs = QuadraticForm.pairs(N)
    monos = np.array([((v >> i) & (v >> j) & 1) for i, j in pairs], dtype=np.int64).reshape(
        len(pairs), 1 << N
    )
    codes = np.arange(1 << len(pairs), dtype=np.int64)
    code_bits = (codes[:, None] >> np.arange(len(pairs))) & 1
    tables = (code_bits @ monos) & 1
    w = fwht(1 - 2 * (tables ^ (g.table & 1)[None, :]))
    mags = np.abs(w)
    best = int(mags.max())
    qi = int(np.argmax(mags.max(axis=1) == best))
    alpha = int(np.argmax(mags[qi] == best))
    const = int(w[qi, alpha] < 0)
    Q = QuadraticForm.from_encoding(N, qi, alpha, const)
    return Q, Fraction((1 << N) + best, 1 << (N + 1))


def quadratic_agreement(g: FnTable, Q: QuadraticForm) -> Fraction:
    if Q.dim != g.dom_dim:
        raise DimensionMismatch("quadratic form and function dimensions differ")
    return Fraction(int(np.count_nonzero((g.table & 1) == Q.table())), 1 << Q.dim)


def extract_bilinear(Q: QuadraticForm, n: int, m: int) -> BitMatrix:
    """A with Q(x, z) = x^T A z + Q1(x) + Q2(z), via second differences."""
    if n + m != Q.dim or n < 1 or m < 1:
        raise DimensionMismatch(f"n + m = {n + m} does not match Q.dim = {Q.dim}")
    q0 = Q(0)
    rows = []
    for i in range(n):
        row = 0
        for j in range(m):
            ei, ej = 1 << i, 1 << (n + j)
            row |= (Q(ei | ej) ^ Q(ei) ^ Q(ej) ^ q0) << j
        rows.append(row)
    return BitMatrix(n, m, tuple(rows))


def linear_shift_agreement(f: FnTable, A: BitMatrix) -> tuple[int, Fraction]:
    """Most common value c of f(x) + x^T A and its exact frequency."""
    if (A.rows, A.cols) != (f.dom_dim, f.codom_dim):
        raise DimensionMismatch("A must be n x m")
    hist = np.bincount(f.table ^ A.left_apply_all(), minlength=1 << f.codom_dim)
    c = int(np.argmax(hist))
    return c, Fraction(int(hist[c]), 1 << f.dom_dim)


@dataclass(frozen=True, eq=False)
class DecompositionReport:
    ell: BitMatrix
    shift_c: int
    agreement_eps: Fraction
    error_image_size: int
    k_delta: int
    cover_size: int
    bound: Fraction
    cover: tuple = ()
    error_image: tuple = ()
    checks: tuple = ()
    details: dict = field(default_factory=dict)

    @property
    def succeeded(self) -> bool:
        return all(b.holds for b in self.checks)

    def to_dict(self) -> dict:
        return {
            "ell": {"rows": self.ell.rows, "cols": self.ell.cols,
                    "data": [format(r, "x") for r in self.ell.data]},
            "shift_c": format(self.shift_c, "x"),
            "agreement_eps": str(self.agreement_eps),
            "error_image_size": self.error_image_size,
            "k_delta": self.k_delta,
            "cover_size": self.cover_size,
            "bound": str(self.bound),
            "cover": [format(b, "x") for b in self.cover],
            "error_image": [format(e, "x") for e in self.error_image],
            "details": self.details,
            "checks": [b.to_dict() for b in self.checks],
        }


def greedy_cover(T: SubsetF2n) -> list[int]:
    """Scan codes upward, keeping b whenever T + b misses every earlier translate."""
    N = 1 << T.dim
    idx = np.arange(N)
    used = np.zeros(N, dtype=bool)
    B = []
    for b in range(N):
        tb = T.members[idx ^ b]
        if not np.any(tb & used):
            used |= tb
            B.append(b)
    return B


def covering_decomposition(
    f: FnTable, A: BitMatrix, shift_c: int, delta: DiffSet | None = None
) -> DecompositionReport:
    n, N = f.dom_dim, 1 << f.dom_dim
    ell = A.left_apply_all()
    err = f.table ^ ell
    T = SubsetF2n(n, err == shift_c)
    if T.size == 0:
        raise DegenerateAgreement(f"no x satisfies f(x) = l(x) + {shift_c:#x}")
    eps = Fraction(T.size, N)
    delta = delta or difference_set(f)
    K = delta.size
    B = greedy_cover(T)
    idx = np.arange(N)

    disjoint_total = sum(T.size for _ in B)
    union = np.zeros(N, dtype=bool)
    for b in B:
        union |= T.members[idx ^ b]
    TT = sumset(T).members
    covered = np.zeros(N, dtype=bool)
    for b in B:
        covered |= TT[idx ^ b]

    dd = {a ^ b for a in delta.values for b in delta.values}
    b_prime = {int(err[b]) for b in B}
    allowed = {r ^ bp for r in dd for bp in b_prime}
    image = sorted({int(e) for e in np.unique(err)})
    outside = [e for e in image if e not in allowed]
    limit = Fraction(K * K) / eps

    checks = (
        bound("cover_size <= ceil(1/eps)", len(B), "<=", math.ceil(1 / eps)),
        bound("translates T+b pairwise disjoint", int(union.sum()), "==", disjoint_total),
        bound("T+T+B covers F_2^n", int(covered.sum()), "==", N),
        bound("error image outside Delta+Delta+B'", len(outside), "==", 0),
        bound("error_image_size <= K^2/eps", len(image), "<=", limit),
    )
    return DecompositionReport(
        ell=A,
        shift_c=shift_c,
        agreement_eps=eps,
        error_image_size=len(image),
        k_delta=K,
        cover_size=len(B),
        bound=limit,
        cover=tuple(B),
        error_image=tuple(image),
        checks=checks,
        details={"b_prime": sorted(b_prime), "delta": sorted(delta.values)},
    )


def pfr_decompose(f: FnTable, quad: QuadraticForm | None = None) -> DecompositionReport:
    """Run the four-step reduction on f, recording every intermediate bound.

    Without `quad` the quadratic comes from the exhaustive search, which
    needs n + m <= 6.  A supplied form must live on n + m variables.
    """
    n, m = f.dom_dim, f.codom_dim
    if quad is None and n + m > MAX_QUAD_DIM:
        raise ResourceLimit("pfr_decompose (exhaustive oracle)", None, f"n + m = {n + m} > {MAX_QUAD_DIM}")
    delta = difference_set(f)
    K = delta.size
    F = lift_inner_product(f)
    checks: list[Bound] = []
    details: dict = {"n": n, "m": m}

    try:
        u3_power = gowers_power_exact(F, 3)
    except ResourceLimit:
        u3_power = None
    if u3_power is not None:
        details["u3_lift"] = float(u3_power) ** 0.125
        checks.append(bound("||F||_U3^8 >= K^-7", u3_power, ">=", Fraction(1, K**7)))

    if quad is None:
        quad, agreement = best_quadratic_exhaustive(F)
        details["oracle"] = "exhaustive"
    else:
        agreement = quadratic_agreement(F, quad)
        details["oracle"] = "supplied"
    corr = abs(2 * agreement - 1)
    details["quadratic"] = quad.to_json()
    details["oracle_agreement"] = str(agreement)
    details["oracle_correlation"] = str(corr)
    checks.append(bound("oracle agreement >= 1/2", max(agreement, 1 - agreement), ">=", Fraction(1, 2)))

    A = extract_bilinear(quad, n, m)
    c, eps = linear_shift_agreement(f, A)
    checks.append(bound("Pr[f = l + c] >= eps^4/K", eps, ">=", corr**4 / K))

    cover = covering_decomposition(f, A, c, delta)
    checks.extend(cover.checks)
    details.update(cover.details)
    return DecompositionReport(
        ell=A,
        shift_c=c,
        agreement_eps=eps,
        error_image_size=cover.error_image_size,
        k_delta=K,
        cover_size=cover.cover_size,
        bound=cover.bound,
        cover=cover.cover,
        error_image=cover.error_image,
        checks=tuple(checks),
        details=details,
    )
