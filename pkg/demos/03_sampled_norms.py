"""
Monte-Carlo U^3 with error bars
===============================

Sampling is reproducible from the seed and agrees with the exact value
to within its reported standard error.
"""

from addcomb.generators import gen_noisy_polynomial
from addcomb.gowers import gowers_norm_exact, gowers_norm_sampled

f = gen_noisy_polynomial(12, 2, 0.05, seed=2).value
exact = gowers_norm_exact(f, 3)
print(f"exact   U3^8 = {float(exact.power):.5f}")

for samples in (10**3, 10**4, 10**5, 10**6):
    r = gowers_norm_sampled(f, 3, samples, seed=11, workers=4)
    z = (r.mean - float(exact.power)) / r.std_error
    print(f"{samples:>8d} samples: {r.mean:.5f} +- {r.std_error:.5f}  (z = {z:+.2f})")
