"""
The partition bound f(m, chi)
=============================

A state with no block larger than m - 1 qubits cannot push xi above
f(m, chi). The bound maximizes over every way of splitting N qubits.
"""

from fractions import Fraction

from dicke_depth.criteria import optimal_partition, partition_bound
from dicke_depth.oracle import bruteforce_bound, integer_partitions

n = 10
print(f"{sum(1 for _ in integer_partitions(n, n))} partitions of {n}")

# The optimizer only visits one candidate per part count; enumeration
# visits them all and agrees exactly.
for chi in (-2, 0, 1, Fraction(n * n, 8)):
    row = []
    for m in range(2, n + 1):
        fast = partition_bound(n, m, float(chi))
        assert abs(fast - float(bruteforce_bound(n, m, chi))) < 1e-12
        row.append(f"{fast:6.2f}")
    print(f"chi={float(chi):5.2f}:", " ".join(row))

# With chi = 0 and (m - 1) dividing N, equal blocks win and f(m, 0) = m.
for m in (2, 3, 6, 11):
    part, _ = optimal_partition(n, m, 0.0)
    print(f"m={m:2d}  f={partition_bound(n, m, 0.0):.3f}  blocks={part.parts}")

# A positive chi penalizes few large blocks, so the optimum shifts.
part, _ = optimal_partition(n, 5, 8.0)
print("m=5, chi=8 ->", part.parts)
