#!/usr/bin/env python3
"""Walk the greedy clustering of 2..n and watch the regular structure appear.

Integers are friends when they share a prime factor.  The greedy adjoins
2, 3, 4, ... in order, each to the class where it causes the fewest new
conflicts (enemies kept together plus friends split apart).  Below the first
irregular point the result is always the same: each integer sits in the class
of its smallest prime factor.
"""

import numpy as np

from gcdcluster import (
    build_prime_table,
    canonical_partition,
    count_conflicts,
    run_accelerated,
    run_reference,
)

table = build_prime_table(100_000)

print("=" * 70)
print("  the first few greedy partitions")
print("=" * 70)
for n in (3, 4, 5, 6, 15):
    st = run_reference(n)
    classes = [sorted(st.partition.members(c).tolist())
               for c in sorted(st.partition.class_sizes)]
    print(f"  G({n:>2}) = {classes}   conflicts = {st.conflicts}")

print()
print("=" * 70)
print("  the two run modes agree, and both equal the canonical clustering")
print("=" * 70)
n = 20_000
ref = run_reference(n)
acc = run_accelerated(n, table)
canon = canonical_partition(n, table)
print(f"  n = {n}")
print(f"  reference == accelerated: "
      f"{np.array_equal(ref.partition.labels, acc.partition.labels)}")
print(f"  accelerated == canonical: "
      f"{np.array_equal(acc.partition.labels, canon.labels)}")
print(f"  conflicts (both modes):   {ref.conflicts} == {acc.conflicts}")
print(f"  anomalies recorded:       {acc.anomalies}")

print()
print("=" * 70)
print("  clustering beats isolating everything")
print("=" * 70)
for n in (10, 100, 1000):
    part = canonical_partition(n, table)
    conflicts = count_conflicts(part)
    singles = sum(
        1 for a in range(2, n + 1) for b in range(a + 1, n + 1)
        if np.gcd(a, b) > 1)
    print(f"  n = {n:>4}: canonical {conflicts:>7} vs all-singletons {singles:>7}")
