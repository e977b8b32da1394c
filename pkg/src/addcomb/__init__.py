"""Computational additive combinatorics over F_2^n.

Sumsets, spans and difference sets; Walsh spectra; exact and sampled
Gowers norms; and the two reductions linking small-doubling structure with
quadratic correlation (``reduction`` and ``inverse3``).
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    AddCombError,
    DegenerateAgreement,
    DimensionMismatch,
    EmptySet,
    FormatError,
    ResourceLimit,
)
from .gf2core import (  # noqa: F401
    DiffSet,
    FnTable,
    PointF2,
    SetStats,
    SubsetF2n,
    derivative,
    difference_set,
    iterated_derivative,
    set_stats,
    span,
    sumset,
)
from .bitmatrix import BitMatrix  # noqa: F401
from .fourier import best_affine_approx, u2_via_spectrum, wht_spectrum  # noqa: F401
from .gowers import gowers_norm_exact, gowers_norm_sampled, polynomial_degree  # noqa: F401
