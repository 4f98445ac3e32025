"""Partitions of [2, n], the friend/enemy relation, and exact conflict counts.

A pair a != b of integers are friends when gcd(a, b) > 1 and enemies
otherwise.  A conflict of a partition is an unordered pair that is either
enemies sharing a class or friends split across classes; the clustering
objective is the number of conflicts.

Class id convention: partitions built by ``canonical_partition`` (and by the
greedy engine while it stays regular) label each integer with the 1-based
index of its smallest prime factor, so class 1 is the evens, class 2 the odd
multiples of 3, and so on.  Id 0 is reserved to mean "a fresh empty class"
when scoring candidate moves.  Arbitrary partitions may use any positive ids.

Partition values are plain data and safe to hand between threads; mutation is
single-owner.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .counts import ClassTally
from .errors import OutOfRangeError, ResourceGuardError, TallyInconsistencyError
from .primes import PrimeTable

# O(n^2) pair enumeration above this point is refused unless overridden.
DEFAULT_CONFLICT_GUARD = 100_000

CSV_HEADER = "integer,class"


def similar(a: int, b: int) -> bool:
    """True when a and b are friends, i.e. gcd(a, b) > 1.

    Self-pairs are not edges of the relation and are rejected.
    """
    if a == b:
        raise ValueError(f"self-pair ({a}, {a}) is not an edge")
    if a < 2 or b < 2:
        raise ValueError(f"vertices start at 2, got ({a}, {b})")
    return gcd(a, b) > 1


@dataclass
class Partition:
    """Labels for every integer in [2, n]; labels[k] is the class of k + 2."""

    n: int
    labels: np.ndarray
    class_sizes: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if len(self.labels) != self.n - 1:
            raise ValueError(
                f"labels cover {len(self.labels)} integers, expected {self.n - 1}")
        if not self.class_sizes:
            self.class_sizes = _sizes_from_labels(self.labels)

    def label(self, m: int) -> int:
        if m < 2 or m > self.n:
            raise ValueError(f"{m} outside [2, {self.n}]")
        return int(self.labels[m - 2])

    def move(self, m: int, new_class: int) -> None:
        """Relabel m, keeping class sizes consistent; empty classes drop out."""
        old = self.label(m)
        if old == new_class:
            return
        self.labels[m - 2] = new_class
        self.class_sizes[old] -= 1
        if self.class_sizes[old] == 0:
            del self.class_sizes[old]
        self.class_sizes[new_class] = self.class_sizes.get(new_class, 0) + 1

    def members(self, class_id: int) -> np.ndarray:
        return np.flatnonzero(self.labels == class_id) + 2

    def copy(self) -> "Partition":
        return Partition(self.n, self.labels.copy(), dict(self.class_sizes))


def _sizes_from_labels(labels: np.ndarray) -> dict[int, int]:
    ids, counts = np.unique(labels, return_counts=True)
    return {int(c): int(k) for c, k in zip(ids, counts)}


def canonical_partition(n: int, table: PrimeTable) -> Partition:
    """The regular clustering: class of m = index of its smallest prime factor."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if n > table.limit:
        raise OutOfRangeError(f"n={n} exceeds table limit {table.limit}")
    if n <= table.spf_limit:
        spf = table._spf[2 : n + 1].astype(np.int64)
        labels = np.searchsorted(table.primes, spf) + 1
    else:
        labels = np.fromiter(
            (table.prime_index(table.smallest_prime_factor(m)) for m in range(2, n + 1)),
            dtype=np.int64, count=n - 1)
    return Partition(n, labels.astype(np.int64))


def exceptional_partition(n: int, table: PrimeTable) -> Partition:
    """The canonical partition of [2, n] with n itself moved to the even class.

    Only defined for odd n divisible by 3 (the shape of the first greedy
    irregularity).
    """
    if n % 2 == 0 or n % 3 != 0:
        raise ValueError(f"need odd n divisible by 3, got {n}")
    part = canonical_partition(n, table)
    part.move(n, 1)
    return part


def count_conflicts(p: Partition, guard: int = DEFAULT_CONFLICT_GUARD) -> int:
    """Exact number of conflicting unordered pairs in [2, p.n].

    A pair conflicts when friendship and co-membership disagree.  Quadratic in
    p.n, hence refused above ``guard``; the greedy engine never needs this at
    scale because single-element moves are scored from tallies instead.
    Deterministic regardless of internal chunking.
    """
    if p.n > guard:
        raise ResourceGuardError(
            f"O(n^2) conflict count at n={p.n} refused (guard {guard}); "
            "raise the guard explicitly if you really want this")
    values = np.arange(2, p.n + 1, dtype=np.int64)
    labels = p.labels
    total = 0
    for idx in range(len(values) - 1):
        a = int(values[idx])
        friends = np.gcd(values[idx + 1 :], a) > 1
        same = labels[idx + 1 :] == labels[idx]
        total += int(np.count_nonzero(friends != same))
    return total


def conflict_delta_of_move(n: int, from_class: int, to_class: int,
                           tallies: dict[int, ClassTally],
                           partition: Partition | None = None) -> int:
    """Change in conflict count caused by relabeling n from one class to another.

    ``tallies`` maps class id -> exact ClassTally of n against that class,
    with n itself excluded from its home class tally.  Id 0 (fresh empty
    class) is always available implicitly.  Computed from tallies only --
    never by pair enumeration -- so it stays exact at any scale:

        delta = (friends - enemies)[from] - (friends - enemies)[to]

    When ``partition`` is supplied the tallies are validated against it: every
    class must be covered and the tally totals must sum to n - 2 (all
    integers in [2, n] except n itself).
    """
    if partition is not None:
        if n < 2 or n > partition.n:
            raise ValueError(f"{n} outside partition range [2, {partition.n}]")
        missing = set(partition.class_sizes) - set(tallies)
        if missing:
            raise TallyInconsistencyError(f"missing tallies for classes {sorted(missing)}")
        covered = sum(t.total for t in tallies.values())
        if covered != partition.n - 2:
            raise TallyInconsistencyError(
                f"tally totals sum to {covered}, expected {partition.n - 2}")
        if from_class != partition.label(n):
            raise ValueError(
                f"{n} is labeled {partition.label(n)}, not {from_class}")
    if from_class == to_class:
        return 0

    def diff(cid: int) -> int:
        if cid == 0:
            return 0
        try:
            t = tallies[cid]
        except KeyError:
            raise TallyInconsistencyError(f"no tally for class {cid}") from None
        return t.diff

    return diff(from_class) - diff(to_class)


def write_partition_csv(p: Partition, fh) -> None:
    """CSV serialization: header then one "integer,class" row per integer."""
    fh.write(CSV_HEADER + "\n")
    for m in range(2, p.n + 1):
        fh.write(f"{m},{int(p.labels[m - 2])}\n")


def partition_to_csv(p: Partition) -> str:
    buf = io.StringIO()
    write_partition_csv(p, buf)
    return buf.getvalue()


def read_partition_csv(fh) -> Partition:
    header = fh.readline().strip()
    if header != CSV_HEADER:
        raise ValueError(f"bad header {header!r}, expected {CSV_HEADER!r}")
    rows = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        m_str, c_str = line.split(",")
        rows.append((int(m_str), int(c_str)))
    if not rows:
        raise ValueError("empty partition file")
    rows.sort()
    n = rows[-1][0]
    if [m for m, _ in rows] != list(range(2, n + 1)):
        raise ValueError("rows must cover exactly [2, n]")
    labels = np.array([c for _, c in rows], dtype=np.int64)
    return Partition(n, labels)
