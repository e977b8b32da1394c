"""Executable invariant suite behind ``addcomb verify``.

Each check returns a list of :class:`Bound` records.  ``quick`` runs small
instances in seconds; ``full`` uses more seeds and larger sizes.
"""

from __future__ import annotations

from fractions import Fraction
import itertools

import numpy as np

from .bitmatrix import BitMatrix
from .checks import Bound, bound
from .fourier import best_affine_approx, u2_via_spectrum, wht_spectrum
from .generators import (
    gen_noisy_polynomial,
    gen_quadratic_phase,
    gen_random_function,
    gen_small_doubling_set,
    gen_structured_hom,
    rng_for,
)
from .gf2core import (
    FnTable,
    SubsetF2n,
    derivative,
    difference_set,
    is_affine_subspace,
    iterated_derivative,
    iterated_derivative_direct,
    span,
    sumset,
)
from .gowers import gowers_norm_exact, gowers_power_exact, polynomial_degree
from .inverse3 import (
    additive_energy,
    bsg_extract,
    derivative_profile,
    fit_global_linear_map,
    span_trim,
)
from .reduction import (
    QuadraticForm,
    a_system_probability,
    build_level_chain,
    extract_bilinear,
    lift_inner_product,
    pfr_decompose,
)

LEVELS = {"quick": {"seeds": 3, "n": 5}, "full": {"seeds": 12, "n": 7}}


def _random_set(n: int, seed: int) -> SubsetF2n:
    rng = rng_for(seed)
    return SubsetF2n.from_codes(n, rng.choice(1 << n, size=max(1, (1 << n) // 5), replace=False))


def check_sets(cfg) -> list[Bound]:
    out = []
    n = cfg["n"]
    for s in range(cfg["seeds"]):
        S = _random_set(n, s)
        ss, sp = sumset(S), span(S)
        out.append(bound(f"0 in S+S [seed {s}]", int(0 in ss), "==", 1))
        out.append(bound(f"S+S subset Span(S) [seed {s}]", int(ss.issubset(sp)), "==", 1))
        out.append(bound(f"Span idempotent [seed {s}]", int(span(sp) == sp), "==", 1))
        coset = gen_small_doubling_set(n, 2, 1, s).value
        K = Fraction(sumset(coset).size, coset.size)
        out.append(bound(f"coset has doubling 1 [seed {s}]", K, "==", 1))
        out.append(bound(f"coset is affine [seed {s}]", int(is_affine_subspace(coset)), "==", 1))
        K = Fraction(sumset(S).size, S.size)
        out.append(bound(f"doubling 1 iff affine [seed {s}]", int(K == 1), "==", int(is_affine_subspace(S))))
    return out


def check_difference_sets(cfg) -> list[Bound]:
    out = []
    n = cfg["n"]
    for s in range(cfg["seeds"]):
        f = gen_random_function(n, 3, s)
        D = difference_set(f)
        out.append(bound(f"f(0) in Delta f [seed {s}]", int(f(0) in D), "==", 1))
        aff = gen_structured_hom(n, 3, 1, s).value
        out.append(bound(f"|Delta f| = 1 for affine f [seed {s}]", difference_set(aff).size, "==", 1))
        out.append(bound(f"|Delta f| > 1 for random f [seed {s}]", D.size, ">=", 2))
    return out


def check_derivatives(cfg) -> list[Bound]:
    out = []
    n = min(cfg["n"], 6)
    rng = rng_for(99)
    for s in range(cfg["seeds"]):
        f = gen_random_function(n, 2, s)
        ys = [int(v) for v in rng.integers(0, 1 << n, size=3)]
        base = iterated_derivative(f, ys)
        perms = all(iterated_derivative(f, p) == base for p in itertools.permutations(ys))
        out.append(bound(f"derivative order independent [seed {s}]", int(perms), "==", 1))
        out.append(bound(f"fold == direct sum [seed {s}]", int(iterated_derivative_direct(f, ys) == base), "==", 1))
    return out


def check_fourier(cfg) -> list[Bound]:
    out = []
    n = cfg["n"] + 1
    for s in range(cfg["seeds"]):
        f = gen_random_function(n, 1, s)
        c = wht_spectrum(f).coeffs
        out.append(bound(f"Parseval error [seed {s}]", abs(float(np.sum(c * c)) - 1.0), "<=", 1e-12))
        diff = abs(u2_via_spectrum(f) - gowers_norm_exact(f, 2).value)
        out.append(bound(f"|U2 - L4 spectrum| [seed {s}]", diff, "<=", 1e-10))
        a = best_affine_approx(f).agreement
        out.append(bound(f"U2 >= 2a - 1 [seed {s}]", u2_via_spectrum(f), ">=", float(2 * a - 1)))
    return out


def check_gowers(cfg) -> list[Bound]:
    out = []
    n = min(cfg["n"], 6)
    for s in range(cfg["seeds"]):
        for d in (2, 3):
            f = gen_noisy_polynomial(n, d, 0.0, s, exact_degree=True).value
            r = gowers_norm_exact(f, d)
            out.append(bound(f"U^{d}<1 at degree {d} [seed {s}]", int(r.value < 1), "==", 1))
            low = gowers_norm_exact(f, d + 1)
            out.append(bound(f"U^{d + 1}=1 at degree {d} [seed {s}]", low.power, "==", 1))
            out.append(bound(f"degree {d} recovered [seed {s}]", polynomial_degree(f), "==", d))
            out.append(bound(f"0 <= U^{d} [seed {s}]", r.power, ">=", 0))
            out.append(bound(f"U^{d} <= 1 [seed {s}]", r.value, "<=", 1.0))
        p = gen_noisy_polynomial(n, 1, 0.2, s)
        agree = Fraction(int(np.count_nonzero(p.value.table == p.meta["planted"].table)), 1 << n)
        eps = 2 * agree - 1
        if eps > 0:
            out.append(bound(f"U^2 >= agreement correlation [seed {s}]", gowers_power_exact(p.value, 2), ">=", eps**4))
    return out


def check_reduction(cfg) -> list[Bound]:
    out = []
    for s in range(cfg["seeds"]):
        f = gen_random_function(3, 2 + s % 2, s)
        K = difference_set(f).size
        p = a_system_probability(f)
        out.append(bound(f"A-system = U3(F)^8 [seed {s}]", p, "==", gowers_power_exact(lift_inner_product(f), 3)))
        out.append(bound(f"A-system >= K^-7 [seed {s}]", p, ">=", Fraction(1, K**7)))
        g = gen_structured_hom(4, 3, 2 + s % 3, s).value
        K = difference_set(g).size
        chain = build_level_chain(g, 3)
        for st in chain.steps:
            out.append(bound(f"density S_{st.level} >= K^-(2^k-1) [seed {s}]", st.density, ">=",
                             Fraction(1, K ** ((1 << st.level) - 1))))
            out.append(bound(f"density S' >= density^2 (level {st.level}) [seed {s}]",
                             st.density_doubled, ">=", st.density_prev**2))
        out.append(bound(f"chain density = predicate count [seed {s}]", chain.density, "==",
                         Fraction(chain.count_members(), 1 << 16)))
        rep = pfr_decompose(gen_structured_hom(3, 3, 2, s).value)
        out.extend(Bound(f"{b.name} [seed {s}]", b.lhs, b.rhs, b.relation, b.holds) for b in rep.checks)
        q = gen_quadratic_phase(5, s).meta["quadratic"]
        out.append(bound(f"bilinear residual cross terms [seed {s}]", _residual_cross(q, 3, 2), "==", 0))
    return out


def _residual_cross(q: QuadraticForm, n: int, m: int) -> int:
    A = extract_bilinear(q, n, m)
    t = q.table()
    bad = 0
    for x, z in itertools.product(range(1 << n), range(1 << m)):
        xaz = bin(A.left_apply(x) & z).count("1") & 1
        t_res = t[x | (z << n)] ^ xaz
        res0 = t[x] ^ t[z << n] ^ t[0]
        bad += int(t_res != res0)
    return bad


def check_inverse(cfg) -> list[Bound]:
    out = []
    n = cfg["n"]
    for s in range(cfg["seeds"]):
        p = gen_quadratic_phase(n, s)
        q = p.meta["quadratic"]
        prof = derivative_profile(p.value)
        M = BitMatrix(n, n, q.quad)
        sym = (M + M.T).apply_all()
        wrong = int(np.count_nonzero(prof.alpha != sym)) + int(np.count_nonzero(prof.u2 != 1.0))
        out.append(bound(f"quadratic f_y linear part (M+M^T)y [seed {s}]", wrong, "==", 0))
        noisy = gen_noisy_polynomial(n, 2, 0.1, s).value
        S = derivative_profile(noisy).pairs()
        codes = S.codes()
        brute = sum(1 for a in codes for b in codes if (a ^ b) in S)
        out.append(bound(f"energy = pair count [seed {s}]", additive_energy(S), "==", Fraction(brute, S.size**2)))
        S1 = bsg_extract(S, 4)
        out.append(bound(f"bsg output within input [seed {s}]", int(S1.issubset(S)), "==", 1))
        S2 = span_trim(S1, 4)
        out.append(bound(f"span_trim output within input [seed {s}]", int(S2.issubset(S1)), "==", 1))
        L, cov = fit_global_linear_map(S2, reference=S)
        images = L.apply_all()
        recount = Fraction(sum(int(images[c & ((1 << n) - 1)] == c >> n) for c in codes), len(codes))
        out.append(bound(f"coverage recomputed [seed {s}]", cov, "==", recount))
    return out


def check_generators(cfg) -> list[Bound]:
    out = []
    for s in range(cfg["seeds"]):
        a = gen_structured_hom(5, 3, 3, s).value
        b = gen_structured_hom(5, 3, 3, s).value
        out.append(bound(f"generator determinism [seed {s}]", int(a == b), "==", 1))
    return out


CHECKS = {
    "sets": check_sets,
    "difference_sets": check_difference_sets,
    "derivatives": check_derivatives,
    "fourier": check_fourier,
    "gowers": check_gowers,
    "reduction": check_reduction,
    "inverse": check_inverse,
    "generators": check_generators,
}


def run_verify(level: str = "quick") -> dict[str, list[Bound]]:
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; expected one of {sorted(LEVELS)}")
    cfg = LEVELS[level]
    return {name: fn(cfg) for name, fn in CHECKS.items()}
