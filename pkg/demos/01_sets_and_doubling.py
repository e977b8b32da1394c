"""
Sumsets, spans and doubling in F_2^n
====================================

A union of r cosets of a subspace has doubling about r/2 but a span
2^r / r times larger than itself.
"""

from addcomb.generators import gen_small_doubling_set
from addcomb.gf2core import set_stats

# four cosets of a 3-dimensional subspace of F_2^9
S = gen_small_doubling_set(9, 3, 4, seed=1).value
st = set_stats(S)
print(f"|S| = {st.size}, |S+S| = {st.sumset_size}, K = {st.doubling}")
print(f"|Span(S)| = {st.span_size}  ({st.span_size // st.size}x |S|)")

# as r grows the span ratio outruns any polynomial in K
for r in range(1, 7):
    st = set_stats(gen_small_doubling_set(10, 3, r, seed=r).value)
    print(f"r={r}: K={float(st.doubling):5.2f}  span/|S|={st.span_size / st.size:6.2f}")
