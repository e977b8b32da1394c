from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from addcomb.errors import DimensionMismatch
from addcomb.generators import (
    GenSpec,
    gen_noisy_polynomial,
    gen_quadratic_phase,
    gen_random_function,
    gen_small_doubling_set,
    gen_structured_hom,
    generate,
    rng_for,
)
from addcomb.gf2core import difference_set, is_affine_subspace, span, span_of, sumset
from addcomb.gowers import anf, gowers_norm_exact, polynomial_degree


def test_rng_is_pcg64():
    g = rng_for(42)
    assert type(g.bit_generator).__name__ == "PCG64"
    assert g.integers(0, 1 << 30) == np.random.Generator(np.random.PCG64(42)).integers(0, 1 << 30)


def test_random_function_reproducible():
    a, b = gen_random_function(1, 1, 17), gen_random_function(1, 1, 17)
    assert a == b and a.table.shape == (2,)
    assert gen_random_function(6, 3, 1) != gen_random_function(6, 3, 2)


@pytest.mark.parametrize("kind", ["noisy_polynomial", "structured_hom", "small_doubling_set",
                                  "random_function", "quadratic_phase"])
def test_generate_deterministic(kind):
    spec = GenSpec(kind, 6, 3, 9, {"K": 3, "v": 2, "r": 2, "rho": 0.1})
    a, b = generate(spec), generate(spec)
    assert a.value == b.value


def test_structured_k1_is_affine():
    p = gen_structured_hom(5, 3, 1, 4)
    c = p.meta["error_values"][0]
    assert difference_set(p.value).values == frozenset({c})
    assert np.array_equal(p.value.table, p.meta["ell"].left_apply_all() ^ c)


@pytest.mark.parametrize("seed", range(5))
def test_structured_k2_delta_small(seed):
    p = gen_structured_hom(5, 3, 2, seed)
    e = set(p.meta["error_values"])
    D = difference_set(p.value).values
    assert len(D) <= 8
    assert D <= {a ^ b ^ c for a in e for b in e for c in e}


def test_structured_bound_checked():
    with pytest.raises(ValueError):
        gen_structured_hom(3, 2, 5, 0)


def test_coset_r1():
    p = gen_small_doubling_set(7, 3, 1, 2)
    S = p.value
    assert S.size == 8 and sumset(S).size == 8 and is_affine_subspace(S)


def test_independent_points():
    S = gen_small_doubling_set(6, 0, 4, 1).value
    assert S.size == 4 and sumset(S).size == 7


@pytest.mark.parametrize("v,r", [(2, 3), (3, 2), (1, 4)])
def test_coset_union_statistics(v, r):
    S = gen_small_doubling_set(8, v, r, 5).value
    assert S.size == r << v
    assert sumset(S).size == (1 + r * (r - 1) // 2) << v
    assert span(S).size == 1 << (v + r)


def test_coset_union_dims():
    with pytest.raises(DimensionMismatch):
        gen_small_doubling_set(4, 3, 2, 0)


def test_noisy_polynomial_degree_and_plant():
    p = gen_noisy_polynomial(7, 2, 0.0, 3)
    assert polynomial_degree(p.value) <= 2
    assert sorted(np.flatnonzero(anf(p.value))) == p.meta["anf"]
    assert gowers_norm_exact(p.value, 3).value == 1.0


def test_noisy_polynomial_flip_rate():
    p = gen_noisy_polynomial(8, 2, 0.1, 0)
    agree = np.mean(p.value.table == p.meta["planted"].table)
    assert abs(agree - 0.9) < 0.05
    assert gowers_norm_exact(p.value, 3).value >= 2 * agree - 1


def test_noisy_polynomial_exact_degree():
    for s in range(10):
        assert polynomial_degree(gen_noisy_polynomial(6, 3, 0.0, s, exact_degree=True).value) == 3


def test_noisy_polynomial_rejects_rate():
    with pytest.raises(ValueError):
        gen_noisy_polynomial(4, 2, 0.5, 0)


def test_quadratic_phase_meta():
    p = gen_quadratic_phase(6, 4)
    assert np.array_equal(p.value.table, p.meta["quadratic"].table())


def test_random_u2_small_at_n10():
    # the mean of U2^4 is (3 - 2/N)/N, so U2 sits near (3/N)^(1/4) ~ 0.23 at N = 1024
    vals = np.array([gowers_norm_exact(gen_random_function(10, 1, s), 2).value for s in range(100)])
    assert np.all(vals <= 0.27)
    assert abs(vals.mean() - (3 / 1024) ** 0.25) < 0.01


@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 4))
@settings(max_examples=30, deadline=None)
def test_structured_hom_image(seed, n, m):
    K = 1 + seed % (1 << m)
    p = gen_structured_hom(n, m, K, seed)
    err = p.value.table ^ p.meta["ell"].left_apply_all()
    assert set(int(v) for v in np.unique(err)) <= set(p.meta["error_values"])
    assert len(p.meta["error_values"]) == K
