"""Seeded instance generators for planted structures.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``: the
same parameters and seed always give bit-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import itertools

import numpy as np

from ._kernels import mobius, popcount
from .bitmatrix import BitMatrix, reduce_basis
from .errors import DimensionMismatch
from .gf2core import FnTable, SubsetF2n, span_of

KINDS = ("noisy_polynomial", "structured_hom", "small_doubling_set", "random_function", "quadratic_phase")


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int
    m: int = 1
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")


@dataclass(frozen=True, eq=False)
class Planted:
    """A generated artifact together with the structure planted in it."""

    value: object
    meta: dict


def random_linear_map(n: int, m: int, rng: np.random.Generator) -> BitMatrix:
    """Uniform n x m matrix; x -> x^T A maps F_2^n to F_2^m."""
    return BitMatrix(n, m, tuple(int(v) for v in rng.integers(0, 1 << m, size=n)))


def gen_random_function(n: int, m: int, seed: int) -> FnTable:
    rng = rng_for(seed)
    return FnTable(n, m, rng.integers(0, 1 << m, size=1 << n, dtype=np.int64))


def gen_structured_hom(n: int, m: int, image_bound: int, seed: int) -> Planted:
    """f = l + e with l linear and e taking `image_bound` distinct values."""
    if not 1 <= image_bound <= 1 << m:
        raise ValueError(f"image bound must lie in [1, 2**{m}]")
    rng = rng_for(seed)
    ell = random_linear_map(n, m, rng)
    values = np.sort(rng.choice(1 << m, size=image_bound, replace=False)).astype(np.int64)
    e = values[rng.integers(0, image_bound, size=1 << n)]
    f = FnTable(n, m, ell.left_apply_all() ^ e)
    return Planted(f, {"ell": ell, "error_values": [int(v) for v in values], "error": e})


def _independent_outside(n: int, base: list[int], count: int, rng) -> list[int]:
    basis = reduce_basis(base)
    out = []
    while len(out) < count:
        v = int(rng.integers(1, 1 << n))
        new = reduce_basis(basis + [v])
        if len(new) > len(basis):
            basis = new
            out.append(v)
    return out


def gen_small_doubling_set(n: int, subspace_dim: int, coset_count: int, seed: int) -> Planted:
    """S = V + {v_1..v_r}: union of r cosets of a random subspace V.

    The shifts are independent modulo V (not necessarily orthogonal to it).
    """
    v, r = subspace_dim, coset_count
    if v < 0 or r < 1 or v + r > n:
        raise DimensionMismatch(f"need v + r <= n, got v={v}, r={r}, n={n}")
    rng = rng_for(seed)
    V_basis = _independent_outside(n, [], v, rng)
    shifts = _independent_outside(n, V_basis, r, rng)
    V = span_of(n, V_basis).codes()
    codes = np.concatenate([V ^ s for s in shifts])
    S = SubsetF2n.from_codes(n, codes)
    return Planted(S, {"subspace_basis": V_basis, "shifts": shifts})


def monomials_up_to(n: int, degree: int) -> np.ndarray:
    masks = np.arange(1 << n)
    return masks[popcount(masks) <= degree]


def gen_noisy_polynomial(
    n: int, degree: int, noise: float, seed: int, exact_degree: bool = False
) -> Planted:
    """Random ANF of degree <= `degree` with each bit flipped w.p. `noise`.

    Each monomial of weight <= degree is present independently w.p. 1/2.
    With ``exact_degree`` one monomial of weight exactly `degree` is forced in.
    """
    if not 0 <= noise < 0.5:
        raise ValueError("noise rate must lie in [0, 1/2)")
    degree = min(degree, n)
    rng = rng_for(seed)
    monos = monomials_up_to(n, degree)
    coeffs = np.zeros(1 << n, dtype=np.uint8)
    coeffs[monos] = rng.integers(0, 2, size=monos.size)
    if exact_degree and degree > 0:
        top = monos[popcount(monos) == degree]
        if not coeffs[top].any():
            coeffs[top[rng.integers(top.size)]] = 1
    planted = mobius(coeffs).astype(np.int64)
    flips = (rng.random(1 << n) < noise).astype(np.int64)
    f = FnTable(n, 1, planted ^ flips)
    return Planted(
        f,
        {
            "anf": [int(c) for c in np.flatnonzero(coeffs)],
            "planted": FnTable(n, 1, planted),
            "flips": int(flips.sum()),
        },
    )


def gen_quadratic_phase(n: int, seed: int, noise: float = 0.0) -> Planted:
    """Random quadratic form (with linear and constant part), optional noise."""
    from .reduction import QuadraticForm

    rng = rng_for(seed)
    pairs = list(itertools.combinations(range(n), 2))
    bits = rng.integers(0, 2, size=len(pairs))
    quad = [0] * n
    for (i, j), b in zip(pairs, bits):
        quad[i] |= int(b) << j
    q = QuadraticForm(n, tuple(quad), int(rng.integers(0, 1 << n)), int(rng.integers(0, 2)))
    clean = q.table()
    flips = (rng.random(1 << n) < noise).astype(np.int64)
    return Planted(FnTable(n, 1, clean ^ flips), {"quadratic": q, "flips": int(flips.sum())})


def generate(spec: GenSpec) -> Planted:
    p = spec.params
    if spec.kind == "random_function":
        return Planted(gen_random_function(spec.n, spec.m, spec.seed), {})
    if spec.kind == "structured_hom":
        return gen_structured_hom(spec.n, spec.m, int(p.get("K", 2)), spec.seed)
    if spec.kind == "small_doubling_set":
        return gen_small_doubling_set(spec.n, int(p.get("v", 0)), int(p.get("r", 1)), spec.seed)
    if spec.kind == "noisy_polynomial":
        return gen_noisy_polynomial(
            spec.n, int(p.get("degree", 2)), float(p.get("rho", 0.0)), spec.seed,
            bool(p.get("exact_degree", False)),
        )
    return gen_quadratic_phase(spec.n, spec.seed, float(p.get("rho", 0.0)))
