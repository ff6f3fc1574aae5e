"""
Searching for counterexamples to the bound
==========================================

Random mixtures of block-product states (blocks of at most m0 qubits)
should never beat f(m0 + 1, chi). We sample, then hill-climb the best.
"""

import numpy as np

from dicke_depth.oracle import bound_margin, bound_violation_search, sanity_search
from dicke_depth.states import BiseparableSpec, BlockProduct

for m0 in (1, 2, 3):
    rep = bound_violation_search(6, m0, trials=300, seed=7, optimize=True, optimize_starts=5)
    print(f"N=6 m0={m0}: max margin {rep.max_margin:+.4f}  "
          f"(random mean {np.mean(rep.margins):+.3f})  violated: {rep.violated}")

# The bound is tight: pairs in the triplet state |1, 0> sit exactly on it.
triplet = np.array([0, 1, 1, 0]) / np.sqrt(2)
pairs = BiseparableSpec([1.0], [BlockProduct([(0, 1), (2, 3), (4, 5)], [triplet] * 3)])
print(f"triplet pairs margin against f(3, chi): {bound_margin(pairs.state(dense_cap=6), 3):+.2e}")

# Feeding unrestricted states to the (N-1)-block bound shows the search can
# find positive margins when they exist.
rep = sanity_search(4, trials=100, seed=1, optimize=False)
print(f"sanity run N=4: max margin {rep.max_margin:+.3f}, Dicke reference {rep.reference['dicke_margin']:+.3f}")
