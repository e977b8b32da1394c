"""Heuristic recovery of a correlating quadratic from a function with large U^3 norm.

Every derivative f_y is approximated by a character ``<alpha_y, x>``; the
graph ``{(y, alpha_y)}`` is pruned to an approximately linear piece, a global
linear map L is fitted to it, and L is integrated back to a quadratic.  All
intermediate quantities are measured and reported, never assumed.

Pair codes in F_2^{2n} put y in the low n bits and alpha_y in the high n bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._kernels import fwht, row_chunk
from .bitmatrix import BitMatrix, reduce_basis
from .errors import DimensionMismatch, EmptySet, ResourceLimit
from .fourier import best_affine_approx
from .gf2core import MAX_DIM, FnTable, SubsetF2n, basis, set_stats, sumset
from .gowers import gowers_norm_exact
from .reduction import QuadraticForm

MAX_PROFILE_DIM = 13


@dataclass(frozen=True, eq=False)
class DerivativeProfile:
    """Per-direction U^2 norm and best character of the derivative f_y."""

    dim: int
    u2: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    shift: np.ndarray = field(repr=False)
    coeff: np.ndarray = field(repr=False)  # signed Fourier coefficient at alpha_y

    @property
    def agreement(self) -> np.ndarray:
        """Pr_x[f_y(x) = <alpha_y, x> + shift_y] for each y."""
        return (1.0 + np.abs(self.coeff)) / 2.0

    def good_fraction(self, tau: float = 0.5) -> Fraction:
        return Fraction(int(np.count_nonzero(self.u2 >= tau)), self.u2.size)

    def pairs(self, tau: float | None = None) -> SubsetF2n:
        """{(y, alpha_y)} as a subset of F_2^{2n}, optionally only y with u2 >= tau."""
        if 2 * self.dim > MAX_DIM:
            raise ResourceLimit("pair set in F_2^{2n}", MAX_DIM // 2)
        y = np.arange(1 << self.dim)
        if tau is not None:
            y = y[self.u2 >= tau]
        return SubsetF2n.from_codes(2 * self.dim, y | (self.alpha[y] << self.dim))


def derivative_profile(f: FnTable) -> DerivativeProfile:
    if f.codom_dim != 1:
        raise DimensionMismatch("derivative profiles need m=1")
    n = f.dom_dim
    if n > MAX_PROFILE_DIM:
        raise ResourceLimit("derivative_profile", MAX_PROFILE_DIM, f"n={n}")
    N = 1 << n
    t = f.table & 1
    idx = np.arange(N)
    u2 = np.empty(N)
    alpha = np.empty(N, dtype=np.int64)
    coeff = np.empty(N)
    step = row_chunk(N)
    for lo in range(0, N, step):
        ys = np.arange(lo, min(N, lo + step))
        w = fwht(1 - 2 * (t[np.bitwise_xor.outer(ys, idx)] ^ t[None, :]))
        fourth = np.array([int(v) for v in np.sum(w**4, axis=1)], dtype=object)
        u2[lo : lo + ys.size] = [float(Fraction(int(v), 1 << (4 * n))) ** 0.25 for v in fourth]
        best = np.argmax(np.abs(w), axis=1)
        alpha[lo : lo + ys.size] = best
        coeff[lo : lo + ys.size] = w[np.arange(ys.size), best] / N
    return DerivativeProfile(n, u2, alpha, (coeff < 0).astype(np.int64), coeff)


@dataclass(frozen=True)
class LinearityGraphStats:
    pairs: SubsetF2n
    energy: Fraction

    @property
    def size(self) -> int:
        return self.pairs.size


def additive_energy(S: SubsetF2n) -> Fraction:
    """|{(a, b) in S^2 : a + b in S}| / |S|^2."""
    if S.size == 0:
        raise EmptySet("energy of an empty set")
    codes = S.codes()
    hits = 0
    step = row_chunk(len(codes))
    for lo in range(0, len(codes), step):
        hits += int(np.count_nonzero(S.members[np.bitwise_xor.outer(codes[lo : lo + step], codes)]))
    return Fraction(hits, S.size**2)


def linearity_energy(profile: DerivativeProfile, tau: float | None = None) -> LinearityGraphStats:
    S = profile.pairs(tau)
    return LinearityGraphStats(S, additive_energy(S))


def participation(S: SubsetF2n) -> np.ndarray:
    """For each x in S (ascending), #{(a, b) in S^2 : a + b + x in S}."""
    codes = S.codes()
    r2 = np.zeros(1 << S.dim, dtype=np.int64)
    step = row_chunk(len(codes))
    for lo in range(0, len(codes), step):
        sums = np.bitwise_xor.outer(codes[lo : lo + step], codes).ravel()
        r2 += np.bincount(sums, minlength=r2.size)
    out = np.zeros(len(codes), dtype=np.int64)
    for lo in range(0, len(codes), step):
        out[lo : lo + step] = r2[np.bitwise_xor.outer(codes[lo : lo + step], codes)].sum(axis=1)
    return out


def _doubling(S: SubsetF2n) -> Fraction:
    return Fraction(sumset(S).size, S.size)


def bsg_extract(S: SubsetF2n, rounds: int = 8) -> SubsetF2n:
    """Prune elements with below-average additive-quadruple participation.

    Stops after `rounds` rounds, when nothing is below average, or when a
    round would not lower the doubling constant.
    """
    if S.size == 0:
        raise EmptySet("bsg_extract needs a nonempty set")
    cur, cur_k = S, _doubling(S)
    for _ in range(rounds):
        w = participation(cur)
        keep = w * len(w) >= w.sum()
        if keep.all():
            break
        nxt = SubsetF2n.from_codes(S.dim, cur.codes()[keep])
        nxt_k = _doubling(nxt)
        if nxt_k >= cur_k:
            break
        cur, cur_k = nxt, nxt_k
    return cur


def _reduce_codes(codes: np.ndarray, echelon: list[int]) -> np.ndarray:
    reps = codes.copy()
    for v in echelon:  # leading bits strictly decreasing
        top = v.bit_length() - 1
        hit = (reps >> top) & 1 == 1
        reps[hit] ^= v
    return reps


def span_trim(S: SubsetF2n, budget: float) -> SubsetF2n:
    """Largest S'' = S ∩ W along a greedy chain of subspaces W with |Span(S'')| <= budget |S''|.

    W grows one vector at a time, always by the element of S whose coset
    of W holds the most points of S (smallest code on ties).  If no stage
    meets the budget, the first nonempty stage is returned.
    """
    if S.size == 0:
        raise EmptySet("span_trim needs a nonempty set")
    codes = S.codes()
    echelon: list[int] = []
    best = fallback = None
    while True:
        reps = _reduce_codes(codes, echelon)
        inside = reps == 0
        if inside.any():
            cand = SubsetF2n.from_codes(S.dim, codes[inside])
            if fallback is None:
                fallback = cand
            if (1 << len(basis(cand))) <= budget * cand.size and (best is None or cand.size > best.size):
                best = cand
        if inside.all():
            break
        out_reps = reps[~inside]
        uniq, inv, counts = np.unique(out_reps, return_inverse=True, return_counts=True)
        per_elem = counts[inv]
        pick = int(codes[~inside][int(np.argmax(per_elem))])
        echelon = reduce_basis(echelon + [pick])
    return best if best is not None else fallback


def _linearity_scores(P: SubsetF2n) -> np.ndarray:
    codes = P.codes()
    out = np.zeros(len(codes), dtype=np.int64)
    step = row_chunk(len(codes))
    for lo in range(0, len(codes), step):
        out[lo : lo + step] = P.members[np.bitwise_xor.outer(codes[lo : lo + step], codes)].sum(axis=1)
    return out


def _graph_coverage(L: BitMatrix, P: SubsetF2n, n: int) -> Fraction:
    codes = P.codes()
    ys, alphas = codes & ((1 << n) - 1), codes >> n
    return Fraction(int(np.count_nonzero(L.apply_all()[ys] == alphas)), len(codes))


def fit_global_linear_map(
    pairs: SubsetF2n, reference: SubsetF2n | None = None
) -> tuple[BitMatrix, Fraction]:
    """Fit L with L y = alpha on a consistent subsystem of the pairs.

    Pairs are fed to Gaussian elimination in order of how many other pairs
    they sum into the set with (most first, then ascending code); a pair
    contradicting the rows already accepted is skipped.  L is zero on the
    coordinate complement of the accepted y's.  Coverage is the fraction of
    `reference` pairs (default: `pairs`) with L y = alpha.
    """
    if pairs.size == 0:
        raise EmptySet("no pairs to fit")
    if pairs.dim % 2:
        raise DimensionMismatch("pair set must live in F_2^{2n}")
    n = pairs.dim // 2
    codes = pairs.codes()
    order = np.lexsort((codes, -_linearity_scores(pairs)))
    pivots: dict[int, tuple[int, int]] = {}
    for c in codes[order]:
        y, a = int(c) & ((1 << n) - 1), int(c) >> n
        while y:
            top = y.bit_length() - 1
            if top not in pivots:
                pivots[top] = (y, a)
                break
            py, pa = pivots[top]
            y ^= py
            a ^= pa
    # images of the standard basis: reduce e_j, non-pivot remainder maps to 0
    cols = []
    for j in range(n):
        y, a = 1 << j, 0
        for top in sorted(pivots, reverse=True):
            if (y >> top) & 1:
                py, pa = pivots[top]
                y ^= py
                a ^= pa
        cols.append(a)
    rows = tuple(sum(((cols[j] >> i) & 1) << j for j in range(n)) for i in range(n))
    L = BitMatrix(n, n, rows)
    return L, _graph_coverage(L, reference if reference is not None else pairs, n)


def _upper(rows, n: int) -> tuple:
    return tuple(r & ~((1 << (i + 1)) - 1) for i, r in enumerate(rows))


def integrate_to_quadratic(L: BitMatrix, f: FnTable) -> tuple[QuadraticForm, float]:
    """Quadratic q whose derivatives have linear parts matching L, plus the best affine fix.

    For a quadratic with strictly upper-triangular matrix M the derivative
    in direction y has linear part (M + M^T) y, so M is read from the upper
    triangle of L (or of L^T when L is not symmetric; the better fit wins).
    Returns q and its correlation 2 Pr[f = q] - 1.
    """
    n = f.dom_dim
    if (L.rows, L.cols) != (n, n):
        raise DimensionMismatch("L must be n x n")
    best = None
    for rows in dict.fromkeys([_upper(L.data, n), _upper(L.T.data, n)]):
        q0 = QuadraticForm(n, rows)
        aff = best_affine_approx(FnTable(n, 1, (f.table & 1) ^ q0.table()))
        q = QuadraticForm(n, rows, aff.alpha.code, aff.shift_bit)
        corr = 2 * aff.agreement - 1
        if best is None or corr > best[1]:
            best = (q, corr)
    return best[0], float(best[1])


def _hex_rows(M: BitMatrix) -> list[str]:
    return [format(r, "x") for r in M.data]


def u3_inverse_pipeline(
    f: FnTable, tau: float = 0.5, bsg_rounds: int = 8, span_budget: float = 4.0
) -> dict:
    """Run all eight stages and return a JSON-ready report keyed step1..step8.

    A stage flagged ``low_quality`` kept under half of its input or ended
    with doubling above 2.
    """
    n = f.dom_dim
    prof = derivative_profile(f)
    full = linearity_energy(prof)
    good = linearity_energy(prof, tau)
    s1 = bsg_extract(good.pairs, bsg_rounds)
    st1 = set_stats(s1)
    s2 = span_trim(s1, span_budget)
    L, coverage = fit_global_linear_map(s2, reference=full.pairs)
    q, corr = integrate_to_quadratic(L, f)
    report = {
        "n": n,
        "step1": {
            "tau": tau,
            "good_fraction": float(prof.good_fraction(tau)),
            "mean_u2": float(np.mean(prof.u2)),
        },
        "step2": {
            "mean_agreement": float(np.mean(prof.agreement)),
            "mean_linear_agreement": float(np.mean((1.0 + prof.coeff) / 2.0)),
        },
        "step3": {"linearity_in_y": float(full.energy)},
        "step4": {"size": good.size, "energy": float(good.energy)},
        "step5": {
            "size": s1.size,
            "fraction": s1.size / good.size,
            "doubling": float(st1.doubling),
            "low_quality": bool(2 * s1.size < good.size or st1.doubling > 2),
        },
        "step6": {
            "budget": span_budget,
            "size": s2.size,
            "span_size": 1 << len(basis(s2)),
        },
        "step7": {"L": _hex_rows(L), "coverage": float(coverage)},
        "step8": {"quadratic": q.to_json(), "correlation": corr},
    }
    if n <= MAX_PROFILE_DIM:
        report["u3"] = gowers_norm_exact(f, 3).value
    return report
