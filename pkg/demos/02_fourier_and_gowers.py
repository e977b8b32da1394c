"""
Walsh spectra and Gowers norms
==============================

U^2 is the l4 norm of the spectrum; U^3 sees quadratic structure that the
spectrum misses.
"""

from addcomb.fourier import best_affine_approx, u2_via_spectrum, wht_spectrum
from addcomb.generators import gen_quadratic_phase, gen_random_function
from addcomb.gowers import gowers_norm_exact, polynomial_degree

n = 10
quad = gen_quadratic_phase(n, seed=4).value
noise = gen_random_function(n, 1, seed=4)

for name, f in (("quadratic", quad), ("random", noise)):
    a = best_affine_approx(f)
    print(f"{name:9s} degree={polynomial_degree(f)}"
          f"  best affine agreement={float(a.agreement):.3f}"
          f"  U2={gowers_norm_exact(f, 2).value:.3f}"
          f"  (spectrum: {u2_via_spectrum(f):.3f})"
          f"  U3={gowers_norm_exact(f, 3).value:.3f}")

# a full-rank quadratic phase has a flat spectrum
print("largest coefficients:", wht_spectrum(quad).top(3))
