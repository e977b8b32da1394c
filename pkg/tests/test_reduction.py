from fractions import Fraction
import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from addcomb.bitmatrix import BitMatrix
from addcomb.errors import DegenerateAgreement, DimensionMismatch, FormatError, ResourceLimit
from addcomb.generators import gen_quadratic_phase, gen_random_function, gen_structured_hom, rng_for
from addcomb.gf2core import FnTable, difference_set
from addcomb.gowers import gowers_norm_exact, gowers_power_exact
from addcomb.reduction import (
    QuadraticForm,
    a_system_probability,
    a_values,
    best_quadratic_exhaustive,
    build_level_chain,
    covering_decomposition,
    extract_bilinear,
    greedy_cover,
    lift_inner_product,
    linear_shift_agreement,
    pfr_decompose,
    quadratic_agreement,
)

from conftest import and_table, brute_gowers_power


def linear_fn(A: BitMatrix, c: int = 0) -> FnTable:
    return FnTable(A.rows, A.cols, A.left_apply_all() ^ c)


def brute_best_quadratic(g: FnTable) -> Fraction:
    N = g.dom_dim
    npairs = N * (N - 1) // 2
    best = 0
    for qc in range(1 << npairs):
        for lin in range(1 << N):
            t = QuadraticForm.from_encoding(N, qc, lin, 0).table()
            agree = int(np.count_nonzero(t == g.table))
            best = max(best, agree, (1 << N) - agree)
    return Fraction(best, 1 << N)


# quadratic forms

def test_quadratic_eval_matches_table():
    q = gen_quadratic_phase(5, 3).meta["quadratic"]
    assert [q(v) for v in range(32)] == list(q.table())


def test_quadratic_rejects_lower_entries():
    with pytest.raises(DimensionMismatch):
        QuadraticForm(2, (0b01, 0))


def test_quadratic_encoding_roundtrip():
    for code in range(1 << 6):
        q = QuadraticForm.from_encoding(4, code, 5, 1)
        assert q.encoding() == (code, 5, 1)


def test_quadratic_json_roundtrip():
    q = gen_quadratic_phase(6, 11).meta["quadratic"]
    assert QuadraticForm.from_json(json.dumps(q.to_json())) == q
    with pytest.raises(FormatError):
        QuadraticForm.from_json('{"dim": 2}')


# lift and A-system

def test_lift_identity_is_and():
    f = FnTable(1, 1, [0, 1])
    assert list(lift_inner_product(f).table) == [0, 0, 0, 1]


def test_lift_of_linear_has_u3_one():
    A = BitMatrix(3, 2, (1, 2, 3))
    F = lift_inner_product(linear_fn(A))
    assert gowers_norm_exact(F, 3).value == 1.0


def test_lift_layout():
    f = gen_random_function(3, 2, 4)
    F = lift_inner_product(f)
    for x, z in itertools.product(range(8), range(4)):
        assert F.table[x | (z << 3)] == bin(int(f.table[x]) & z).count("1") % 2


def test_a_system_linear_is_one():
    assert a_system_probability(linear_fn(BitMatrix(3, 3, (1, 6, 5)), 3)) == 1


@pytest.mark.parametrize("seed", range(4))
def test_a_system_identity_against_definition(seed):
    f = gen_random_function(2, 2, seed)
    p = a_system_probability(f)
    assert float(p) == pytest.approx(brute_gowers_power(lift_inner_product(f), 3), abs=1e-15)


@pytest.mark.parametrize("m", [2, 3])
def test_a_system_identity_exact(m):
    f = gen_random_function(3, m, 21 + m)
    assert a_system_probability(f) == gowers_power_exact(lift_inner_product(f), 3)


def test_a_system_budget():
    with pytest.raises(ResourceLimit):
        a_system_probability(gen_random_function(8, 1, 0))


def test_lift_u3_bound_planted():
    f = gen_structured_hom(4, 3, 3, 5).value
    K = difference_set(f).size
    assert gowers_norm_exact(lift_inner_product(f), 3).value >= K ** (-7 / 8)


# level chain

def test_chain_affine():
    A = BitMatrix(4, 3, (1, 2, 4, 7))
    ch = build_level_chain(linear_fn(A, 5), 1)
    assert ch.shifts == (5,) and ch.density == 1


def brute_chain_count(f, shifts):
    n, k = f.dom_dim, len(shifts)
    t = [int(v) for v in f.table]
    count = 0
    for x, *ys in itertools.product(range(1 << n), repeat=k + 1):
        ok = True
        for sub in itertools.product((0, 1), repeat=k):
            off, rhs = x, t[x]
            for bit, y, c in zip(sub, ys, shifts):
                if bit:
                    off ^= y
                    rhs ^= t[y] ^ c
            ok &= t[off] == rhs
        count += ok
    return count


@pytest.mark.parametrize("seed", range(3))
def test_chain_density_matches_definition(seed):
    f = gen_structured_hom(3, 3, 3, seed).value
    ch = build_level_chain(f, 2)
    assert ch.density == Fraction(brute_chain_count(f, ch.shifts), 1 << 9)
    assert ch.count_members() == brute_chain_count(f, ch.shifts)


def test_chain_first_shift_is_mode():
    f = gen_random_function(3, 2, 8)
    t = f.table
    hist = np.zeros(4, dtype=int)
    for x, y in itertools.product(range(8), repeat=2):
        hist[t[x ^ y] ^ t[x] ^ t[y]] += 1
    ch = build_level_chain(f, 1)
    assert ch.shifts[0] == int(np.argmax(hist)) and ch.density == Fraction(int(hist.max()), 64)


@pytest.mark.parametrize("seed", range(3))
def test_chain_bounds(seed):
    f = gen_structured_hom(4, 3, 2 + seed, seed).value
    K = difference_set(f).size
    ch = build_level_chain(f, 3)
    assert ch.density >= ch.lower_bound(K)
    for st_ in ch.steps:
        assert st_.density_doubled >= st_.density_prev**2
        assert st_.density >= Fraction(1, K ** ((1 << st_.level) - 1))


def test_level3_members_pass_a_test():
    f = gen_structured_hom(3, 2, 2, 1).value
    ch = build_level_chain(f, 3)
    hits = 0
    for x, y1, y2, y3 in itertools.product(range(8), repeat=4):
        if ch.contains(x, (y1, y2, y3)):
            hits += 1
            assert not any(a_values(f, x, y1, y2, y3))
    assert hits > 0 and a_system_probability(f) >= ch.density


# exhaustive quadratic search

def test_exhaustive_recovers_quadratic():
    q = gen_quadratic_phase(5, 9).meta["quadratic"]
    Q, agree = best_quadratic_exhaustive(q.to_fn())
    assert agree == 1 and Q == q


def test_exhaustive_plant_with_noise():
    p = gen_quadratic_phase(5, 1, noise=0.1)
    Q, agree = best_quadratic_exhaustive(p.value)
    assert Q == p.meta["quadratic"]
    assert agree == Fraction(32 - p.meta["flips"], 32)


def test_exhaustive_matches_brute_force():
    g = gen_random_function(4, 1, 6)
    Q, agree = best_quadratic_exhaustive(g)
    assert agree == brute_best_quadratic(g) == quadratic_agreement(g, Q)


def test_exhaustive_cubic_below_one():
    g = FnTable.from_function(6, 1, lambda v: ((v & 7) == 7) ^ ((v >> 3) == 7))
    _, agree = best_quadratic_exhaustive(g)
    assert Fraction(1, 2) <= agree < 1


def test_exhaustive_tie_break():
    Q, agree = best_quadratic_exhaustive(FnTable(3, 1, np.zeros(8, dtype=np.int64)))
    assert Q.encoding() == (0, 0, 0) and agree == 1


def test_exhaustive_limit():
    with pytest.raises(ResourceLimit, match="6"):
        best_quadratic_exhaustive(gen_random_function(7, 1, 0))


# bilinear part

def test_bilinear_single_cross_term():
    q = QuadraticForm(4, (0b100, 0, 0, 0))  # x_0 z_0 with n=2, m=2
    A = extract_bilinear(q, 2, 2)
    assert A.data == (1, 0)


def test_bilinear_x_only():
    q = QuadraticForm(4, (0b10, 0, 0, 0), 0b11, 1)
    assert extract_bilinear(q, 2, 2).data == (0, 0)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_bilinear_residual_separates(seed):
    n, m = 3, 2
    q = gen_quadratic_phase(5, seed).meta["quadratic"]
    A = extract_bilinear(q, n, m)
    t = q.table()
    res = np.array([t[x | (z << n)] ^ (bin(A.left_apply(x) & z).count("1") & 1)
                    for z in range(4) for x in range(8)]).reshape(4, 8)
    # the residual has no mixed second differences
    for x, z in itertools.product(range(8), range(4)):
        assert res[z, x] ^ res[0, x] ^ res[z, 0] ^ res[0, 0] == 0


def test_bilinear_dims():
    with pytest.raises(DimensionMismatch):
        extract_bilinear(QuadraticForm(3, (0, 0, 0)), 2, 2)


# linear shift and covering

def test_linear_shift_exact():
    A = BitMatrix(4, 3, (3, 5, 6, 1))
    assert linear_shift_agreement(linear_fn(A, 6), A) == (6, 1)


def test_linear_shift_pigeonhole():
    f = gen_random_function(6, 3, 2)
    c, eps = linear_shift_agreement(f, BitMatrix(6, 3, (1, 2, 4, 0, 3, 5)))
    assert eps >= Fraction(1, 8)
    hist = np.bincount(f.table ^ BitMatrix(6, 3, (1, 2, 4, 0, 3, 5)).left_apply_all(), minlength=8)
    assert hist[c] == hist.max() and c == int(np.argmax(hist))


def test_cover_affine():
    A = BitMatrix(3, 2, (1, 2, 3))
    rep = covering_decomposition(linear_fn(A, 2), A, 2)
    assert rep.cover == (0,) and rep.error_image == (2,) and rep.error_image_size == 1
    assert rep.succeeded


def test_cover_bound_arithmetic():
    # K = 2, eps = 1/4
    f = FnTable(2, 1, [1, 0, 0, 0])
    rep = covering_decomposition(f, BitMatrix(2, 1, (0, 0)), 1)
    assert rep.k_delta == 2 and rep.agreement_eps == Fraction(1, 4) and rep.bound == 16
    assert rep.succeeded


def test_cover_degenerate():
    A = BitMatrix(2, 2, (0, 0))
    with pytest.raises(DegenerateAgreement):
        covering_decomposition(FnTable(2, 2, [0, 0, 0, 0]), A, 1)


def test_greedy_cover_translates_disjoint():
    from addcomb.gf2core import SubsetF2n
    T = SubsetF2n.from_codes(4, [0, 3, 5])
    B = greedy_cover(T)
    seen = set()
    for b in B:
        tr = {t ^ b for t in (0, 3, 5)}
        assert not tr & seen
        seen |= tr
    for v in range(16):  # maximality
        if v not in B:
            assert {t ^ v for t in (0, 3, 5)} & seen


def test_cover_planted_containment():
    f = gen_structured_hom(5, 3, 3, 2).value
    A = BitMatrix(5, 3, gen_structured_hom(5, 3, 3, 2).meta["ell"].data)
    c, _ = linear_shift_agreement(f, A)
    rep = covering_decomposition(f, A, c)
    D = difference_set(f).values
    Bp = {int(f.table[b] ^ A.left_apply(b)) for b in rep.cover}
    allowed = {a ^ b ^ e for a in D for b in D for e in Bp}
    assert set(rep.error_image) <= allowed
    assert rep.error_image_size <= rep.bound and rep.succeeded


# full reduction

def test_pfr_linear():
    A = BitMatrix(3, 3, (5, 2, 7))
    rep = pfr_decompose(linear_fn(A))
    assert rep.agreement_eps == 1 and rep.error_image_size == 1 and rep.succeeded


@pytest.mark.parametrize("seed", [0, 7, 13])
def test_pfr_structured(seed):
    rep = pfr_decompose(gen_structured_hom(3, 3, 2, seed).value)
    assert rep.succeeded
    assert rep.error_image_size <= Fraction(rep.k_delta**2) / rep.agreement_eps
    names = {b.name for b in rep.checks}
    assert {"||F||_U3^8 >= K^-7", "oracle agreement >= 1/2", "Pr[f = l + c] >= eps^4/K",
            "error_image_size <= K^2/eps"} <= names


@pytest.mark.parametrize("seed", range(3))
def test_pfr_random_completes(seed):
    rep = pfr_decompose(gen_random_function(3, 3, seed))
    assert all(b.holds for b in rep.checks)


def test_pfr_limit_and_supplied_quad():
    f = gen_structured_hom(5, 3, 2, 1).value
    with pytest.raises(ResourceLimit):
        pfr_decompose(f)
    ell = gen_structured_hom(5, 3, 2, 1).meta["ell"]
    quad = [0] * 8
    for i in range(5):
        quad[i] = ell.data[i] << 5
    rep = pfr_decompose(f, QuadraticForm(8, tuple(quad)))
    assert rep.details["oracle"] == "supplied" and rep.succeeded
    assert rep.ell.data == ell.data
