"""
Recovering a quadratic from a large U^3 norm
============================================

Each derivative is replaced by its best character, the graph y -> alpha_y
is cleaned up, a linear map is fitted and integrated back.
"""

import json

from addcomb.generators import gen_noisy_polynomial, gen_random_function
from addcomb.inverse3 import u3_inverse_pipeline

noisy = gen_noisy_polynomial(10, 2, 0.1, seed=3)
planted = (noisy.value.table == noisy.meta["planted"].table).mean() * 2 - 1
rep = u3_inverse_pipeline(noisy.value)
print(f"planted correlation {planted:.3f}, recovered {rep['step8']['correlation']:.3f}")
print(json.dumps({k: rep[k] for k in ("step1", "step4", "step5", "step6")}, indent=1))

# a random function gives only its largest Walsh coefficient
base = u3_inverse_pipeline(gen_random_function(10, 1, seed=3))
print(f"random baseline: correlation {base['step8']['correlation']:.3f}, "
      f"good fraction {base['step1']['good_fraction']:.3f}")
