"""Walsh-Hadamard analysis of Boolean functions f: F_2^n -> F_2."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._kernels import fwht, parity
from .errors import DimensionMismatch
from .gf2core import FnTable, PointF2


def _boolean(f: FnTable) -> None:
    if f.codom_dim != 1:
        raise DimensionMismatch(f"expected a Boolean function (m=1), got m={f.codom_dim}")


def walsh_sums(f: FnTable) -> np.ndarray:
    """Integer Walsh sums W(a) = sum_x (-1)^(f(x) + <a,x>)."""
    _boolean(f)
    return fwht(f.signs())


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    dim: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, alpha) -> float:
        return float(self.coeffs[int(getattr(alpha, "code", alpha))])

    def top(self, k: int) -> list[tuple[int, float]]:
        """k largest |coeff|, ties broken by smaller alpha code."""
        order = np.lexsort((np.arange(self.coeffs.size), -np.abs(self.coeffs)))
        return [(int(a), float(self.coeffs[a])) for a in order[:k]]


@dataclass(frozen=True)
class AffineApprox:
    alpha: PointF2
    shift_bit: int
    agreement: Fraction

    def table(self) -> np.ndarray:
        x = np.arange(1 << self.alpha.dim)
        return (parity(x & self.alpha.code) ^ self.shift_bit).astype(np.int64)


def wht_spectrum(f: FnTable) -> FourierSpectrum:
    n = f.dom_dim
    return FourierSpectrum(n, walsh_sums(f) / float(1 << n))


def _best_from_walsh(w: np.ndarray, n: int) -> AffineApprox:
    mags = np.abs(w)
    alpha = int(np.argmax(mags))  # first maximum = smallest code
    shift = int(w[alpha] < 0)
    agreement = Fraction((1 << n) + int(mags[alpha]), 1 << (n + 1))
    return AffineApprox(PointF2(n, alpha), shift, agreement)


def best_affine_approx(f: FnTable) -> AffineApprox:
    """Affine function <alpha, x> + shift closest to f.

    Ties go to the smallest alpha code; the shift is 1 exactly when the
    chosen coefficient is negative.
    """
    return _best_from_walsh(walsh_sums(f), f.dom_dim)


def u2_via_spectrum(f: FnTable) -> float:
    """U^2 norm of (-1)^f as the L4 norm of its Fourier coefficients."""
    w = walsh_sums(f)
    n = f.dom_dim
    # sum W^4 <= (sum W^2)^2 = 2^(4n), so int64 is safe for n <= 15
    total = int(np.sum(w.astype(np.int64) ** 4)) if n <= 15 else sum(int(v) ** 4 for v in w)
    return float(Fraction(total, 1 << (4 * n))) ** 0.25
