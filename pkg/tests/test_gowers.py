from fractions import Fraction
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from addcomb.errors import DimensionMismatch, ResourceLimit
from addcomb.generators import gen_noisy_polynomial, gen_random_function
from addcomb.gf2core import FnTable, iterated_derivative_direct
from addcomb.gowers import (
    anf,
    feasible_max_n,
    gowers_norm_exact,
    gowers_norm_sampled,
    gowers_power_exact,
    polynomial_degree,
)

from conftest import and_table, brute_gowers_power


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("seed", range(3))
def test_exact_matches_definition(d, seed):
    f = gen_random_function(3 if d == 3 else 4, 1, seed)
    assert float(gowers_power_exact(f, d)) == pytest.approx(brute_gowers_power(f, d), abs=1e-15)


def test_u4_matches_definition():
    f = gen_random_function(3, 1, 5)
    assert float(gowers_power_exact(f, 4)) == pytest.approx(brute_gowers_power(f, 4), abs=1e-15)


def test_u1_is_abs_mean():
    f = gen_random_function(6, 1, 4)
    mean = np.mean(1 - 2 * f.table)
    assert gowers_norm_exact(f, 1).value == pytest.approx(abs(mean), abs=1e-15)


def test_and_norms():
    f = and_table(2)
    assert gowers_norm_exact(f, 2).value == pytest.approx(2**-0.5, abs=1e-15)
    assert gowers_norm_exact(f, 2).power == Fraction(1, 4)
    assert gowers_norm_exact(f, 3).value == 1.0


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_low_degree_has_norm_one(d):
    for s in range(4):
        f = gen_noisy_polynomial(6 if d < 4 else 5, d - 1, 0.0, s).value
        r = gowers_norm_exact(f, d)
        assert r.power == 1 and r.value == 1.0


def test_power_denominator():
    f = gen_random_function(5, 1, 1)
    for d in (1, 2, 3):
        p = gowers_power_exact(f, d)
        assert (1 << (5 * (d + 1))) % p.denominator == 0


def test_budget_error_names_max_n():
    assert feasible_max_n(3) == 13
    with pytest.raises(ResourceLimit, match="feasible max n = 13"):
        gowers_norm_exact(FnTable(14, 1, np.zeros(1 << 14, dtype=np.int64)), 3)


def test_needs_boolean():
    with pytest.raises(DimensionMismatch):
        gowers_norm_exact(FnTable(2, 2, [0, 1, 2, 3]), 2)


def test_sampled_constant_and_low_degree():
    f = FnTable(6, 1, np.ones(64, dtype=np.int64))
    r = gowers_norm_sampled(f, 3, 1000, seed=1)
    assert r.mean == 1.0 and r.value == 1.0 and r.std_error == 0.0
    g = gen_noisy_polynomial(6, 2, 0.0, 3).value
    assert gowers_norm_sampled(g, 3, 5000, seed=2).mean == 1.0


def test_sampled_close_to_exact():
    f = gen_random_function(8, 1, 77)
    exact = float(gowers_power_exact(f, 3))
    r = gowers_norm_sampled(f, 3, 10**6, seed=5)
    assert abs(r.mean - exact) <= 3 * r.std_error


def test_sampled_reproducible_and_worker_split():
    f = gen_random_function(7, 1, 3)
    a = gowers_norm_sampled(f, 2, 20000, seed=9, workers=3)
    b = gowers_norm_sampled(f, 2, 20000, seed=9, workers=3)
    assert a == b and a.workers == 3
    one = gowers_norm_sampled(f, 2, 20000, seed=9)
    assert one.samples == a.samples


def test_sampled_negative_mean_clamped():
    f = gen_random_function(2, 1, 0)
    for seed in range(40):
        r = gowers_norm_sampled(f, 1, 3, seed=seed)
        if r.mean < 0:
            assert r.value == 0.0
            return
    pytest.skip("no negative mean drawn")


def test_degree_examples():
    assert polynomial_degree(FnTable(3, 1, np.ones(8, dtype=np.int64))) == 0
    assert polynomial_degree(FnTable(3, 1, np.zeros(8, dtype=np.int64))) == 0
    assert polynomial_degree(and_table(2)) == 2


def brute_degree(f):
    """Smallest D such that every (D+1)-fold derivative vanishes."""
    n = f.dom_dim
    for D in range(n + 1):
        if all(
            not iterated_derivative_direct(f, ys).table.any()
            for ys in itertools.combinations_with_replacement(range(1 << n), D + 1)
        ):
            return D
    return n


@pytest.mark.parametrize("seed", range(4))
def test_degree_matches_derivative_oracle(seed):
    f = gen_random_function(4, 1, seed)
    assert polynomial_degree(f) == brute_degree(f)


def test_anf_of_and():
    assert list(np.flatnonzero(anf(and_table(3)))) == [3]


@given(st.integers(0, 2**32 - 1), st.integers(2, 3))
@settings(max_examples=25, deadline=None)
def test_norm_one_iff_low_degree(seed, d):
    f = gen_random_function(5, 1, seed) if seed % 2 else gen_noisy_polynomial(5, seed % 4, 0.0, seed).value
    r = gowers_norm_exact(f, d)
    assert (r.power == 1) == (polynomial_degree(f) <= d - 1)
    assert 0 <= r.power <= 1


@given(st.integers(0, 2**32 - 1), st.integers(2, 3), st.floats(0.0, 0.3))
@settings(max_examples=25, deadline=None)
def test_norm_at_least_plant_correlation(seed, d, rho):
    p = gen_noisy_polynomial(6, d - 1, rho, seed)
    agree = Fraction(int(np.count_nonzero(p.value.table == p.meta["planted"].table)), 64)
    eps = 2 * agree - 1
    if eps > 0:
        assert gowers_power_exact(p.value, d) >= eps ** (1 << d)


def test_random_u2_concentration():
    # E[U2^4] = (3 - 2/N)/N for a uniformly random function on N = 2^n points
    n, N = 10, 1 << 10
    powers = np.array([float(gowers_power_exact(gen_random_function(n, 1, s), 2)) for s in range(100)])
    expected = (3 - 2 / N) / N
    assert abs(powers.mean() - expected) < 0.05 * expected
    assert np.all(powers ** 0.25 < 0.27)
