"""
From a small difference set to a linear map
===========================================

f = l + e where e takes two values.  The reduction lifts f to a
boolean function, finds its best quadratic, reads a linear map off the
cross terms and covers the error image.
"""

from addcomb.generators import gen_structured_hom
from addcomb.reduction import pfr_decompose

p = gen_structured_hom(3, 3, 2, seed=7)
rep = pfr_decompose(p.value)

# the recovered map need not equal the planted one, only explain f as well
print("planted l rows:", p.meta["ell"].data, " recovered:", rep.ell.data)
print(f"K = |Delta f| = {rep.k_delta}, agreement = {rep.agreement_eps}")
print(f"error image {list(rep.error_image)} has size {rep.error_image_size} <= K^2/eps = {rep.bound}")
for b in rep.checks:
    print(f"  [{'ok' if b.holds else '!!'}] {b.name}: {b.lhs} vs {b.rhs}")
