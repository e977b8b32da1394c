"""Gowers U^d norms of (-1)^f and exact polynomial degree.

Exact evaluation uses the recursion
``||f||_{U^d}^{2^d} = E_y ||f_y||_{U^{d-1}}^{2^{d-1}}``.  Order 2 is computed
from squared autocorrelations; orders 3 and up run the recursion down to a
batched Walsh transform of the (d-2)-fold derivatives.  All accumulation is
in integers, so the returned ``power`` is an exact rational.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
import itertools
import math

import numpy as np

from ._kernels import fwht, mobius, popcount, row_chunk, subset_xors
from .errors import DimensionMismatch, ResourceLimit
from .gf2core import FnTable

MAX_EXACT_WORK = 1 << 31
SAMPLE_BATCH = 1 << 16


@dataclass(frozen=True)
class GowersResult:
    d: int
    value: float
    mode: str  # "exact" | "sampled"
    samples: int | None = None
    std_error: float | None = None
    mean: float | None = None  # signed pre-root estimate (sampled mode)
    power: Fraction | None = None  # exact value ** (2 ** d) (exact mode)
    workers: int = 1

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "value": self.value,
            "mode": self.mode,
            "samples": self.samples,
            "std_error": self.std_error,
        }


def _boolean(f: FnTable) -> None:
    if f.codom_dim != 1:
        raise DimensionMismatch(f"Gowers norms need m=1, got m={f.codom_dim}")


def exact_work(n: int, d: int) -> int:
    if d == 1:
        return 1 << n
    if d == 2:
        return 1 << (2 * n)
    return max(n, 1) * (1 << (n * (d - 1)))


def feasible_max_n(d: int, budget: int = MAX_EXACT_WORK) -> int:
    n = 0
    while exact_work(n + 1, d) <= budget:
        n += 1
    return n


def _autocorr_energy(s: np.ndarray) -> int:
    """sum_a (sum_x s(x) s(x^a))^2 for a +-1 vector s."""
    N = s.size
    idx = np.arange(N)
    total = 0
    step = row_chunk(N)
    for lo in range(0, N, step):
        a = np.arange(lo, min(N, lo + step))
        r = s[np.bitwise_xor.outer(a, idx)] @ s
        total += int(np.sum(r * r))
    return total


def _walsh4_energy(g: np.ndarray) -> int:
    """sum_y sum_alpha W_{g_y}(alpha)^4 over every direction y (g is a 0/1 table)."""
    N = g.size
    idx = np.arange(N)
    total = 0
    step = row_chunk(N)
    for lo in range(0, N, step):
        ys = np.arange(lo, min(N, lo + step))
        rows = g[np.bitwise_xor.outer(ys, idx)] ^ g[None, :]
        w = fwht(1 - 2 * rows)
        total += sum(int(v) for v in np.sum(w * w * w * w, axis=1))
    return total


def gowers_power_exact(f: FnTable, d: int, budget: int = MAX_EXACT_WORK) -> Fraction:
    """Exact ``E[(-1)^{f_{y_1..y_d}(x)}]`` as a rational with denominator 2^{n(d+1)}."""
    _boolean(f)
    if d < 1:
        raise ValueError("order d must be >= 1")
    n = f.dom_dim
    if exact_work(n, d) > budget:
        raise ResourceLimit(f"exact U^{d}", feasible_max_n(d, budget), f"n={n}")
    N = 1 << n
    t = f.table & 1
    if d == 1:
        acc = int(np.sum(1 - 2 * t)) ** 2
    elif d == 2:
        acc = _autocorr_energy(1 - 2 * t)
    else:
        idx = np.arange(N)
        acc4 = 0
        for prefix in itertools.product(range(N), repeat=d - 3):
            g = t
            for y in prefix:
                g = g[idx ^ y] ^ g
            acc4 += _walsh4_energy(g)
        assert acc4 % N == 0
        acc = acc4 // N
    if acc < 0:
        raise ArithmeticError("negative Gowers accumulator")
    return Fraction(acc, 1 << (n * (d + 1)))


def _root(power: float, d: int) -> float:
    if power >= 1.0:
        return 1.0
    return max(power, 0.0) ** (1.0 / (1 << d))


def gowers_norm_exact(f: FnTable, d: int, budget: int = MAX_EXACT_WORK) -> GowersResult:
    p = gowers_power_exact(f, d, budget)
    return GowersResult(d=d, value=_root(float(p), d), mode="exact", power=p)


def _sample_sum(t: np.ndarray, n: int, d: int, count: int, seed: int) -> int:
    rng = np.random.default_rng(seed)
    masks = [mask for mask, _ in subset_xors([0] * d)]
    total = 0
    done = 0
    while done < count:
        b = min(SAMPLE_BATCH, count - done)
        pts = rng.integers(0, 1 << n, size=(b, d + 1), dtype=np.int64)
        acc = np.zeros(b, dtype=np.int64)
        for mask in masks:
            off = pts[:, 0].copy()
            for i in range(d):
                if (mask >> i) & 1:
                    off ^= pts[:, i + 1]
            acc ^= t[off]
        total += b - 2 * int(acc.sum())
        done += b
    return total


def gowers_norm_sampled(
    f: FnTable, d: int, samples: int, seed: int, workers: int = 1
) -> GowersResult:
    """Monte-Carlo estimate of the U^d norm.

    The sample budget is split across `workers`; worker ``w`` draws from a
    generator seeded with ``seed + w``, so results depend on the worker
    count but never on scheduling.
    """
    _boolean(f)
    if samples < 1 or workers < 1:
        raise ValueError("samples and workers must be positive")
    n = f.dom_dim
    t = f.table & 1
    counts = [samples // workers + (w < samples % workers) for w in range(workers)]
    jobs = [(t, n, d, c, seed + w) for w, c in enumerate(counts) if c]
    if workers == 1:
        sums = [_sample_sum(*j) for j in jobs]
    else:
        with ThreadPoolExecutor(workers) as ex:
            sums = list(ex.map(lambda j: _sample_sum(*j), jobs))
    mean = sum(sums) / samples
    # products are +-1, so the sample variance is a function of the mean
    var = samples / (samples - 1) * (1.0 - mean * mean) if samples > 1 else 0.0
    se = math.sqrt(max(var, 0.0) / samples)
    return GowersResult(
        d=d,
        value=_root(mean, d),
        mode="sampled",
        samples=samples,
        std_error=se,
        mean=mean,
        workers=workers,
    )


def anf(f: FnTable) -> np.ndarray:
    """Algebraic normal form coefficients; entry S is the coefficient of prod_{i in S} x_i."""
    if f.codom_dim != 1:
        raise DimensionMismatch("ANF is defined here for m=1")
    return mobius(f.table & 1)


def polynomial_degree(f: FnTable) -> int:
    """Degree over GF(2); the zero function has degree 0."""
    coeffs = anf(f)
    support = np.flatnonzero(coeffs)
    if not support.size:
        return 0
    return int(popcount(support).max())
