"""Partition model, conflict counting, and tally-based move deltas."""

import io
import random
from math import gcd

import numpy as np
import pytest

from gcdcluster import (
    ClassTally,
    ResourceGuardError,
    TallyInconsistencyError,
    build_prime_table,
    canonical_partition,
    conflict_delta_of_move,
    count_conflicts,
    exceptional_partition,
    factorize,
    partition_to_csv,
    read_partition_csv,
    similar,
    tally_even_class,
)
from gcdcluster.partition import Partition
from oracles import naive_conflicts, naive_spf

FIRST_IRREGULAR = 111546435


# ------------------------------------------------------------------- relation

def test_similar_basic():
    assert not similar(2, 3)
    assert similar(6, 15)


def test_first_irregular_is_odd():
    assert not similar(FIRST_IRREGULAR, 2)


def test_similar_rejects_self_pair():
    with pytest.raises(ValueError):
        similar(7, 7)


# ---------------------------------------------------------- canonical classes

def test_canonical_15_matches_greedy_listing(small_table):
    part = canonical_partition(15, small_table)
    assert part.members(1).tolist() == [2, 4, 6, 8, 10, 12, 14]
    assert part.members(2).tolist() == [3, 9, 15]
    assert part.members(3).tolist() == [5]
    assert part.members(4).tolist() == [7]
    assert part.members(5).tolist() == [11]
    assert part.members(6).tolist() == [13]


def test_canonical_base_case(small_table):
    part = canonical_partition(2, small_table)
    assert part.class_sizes == {1: 1}
    assert part.label(2) == 1


def test_canonical_30_sizes(small_table):
    part = canonical_partition(30, small_table)
    assert part.class_sizes[1] == 15
    assert part.class_sizes[2] == 5
    assert part.class_sizes[3] == 2


def test_canonical_is_smallest_prime_factor_rule(small_table):
    part = canonical_partition(1000, small_table)
    for m in range(2, 1001):
        assert small_table.prime(part.label(m)) == naive_spf(m)
    assert sum(part.class_sizes.values()) == 999


def test_canonical_without_spf_array():
    t = build_prime_table(2000, spf_limit=10)
    part = canonical_partition(300, t)
    for m in range(2, 301):
        assert t.prime(part.label(m)) == naive_spf(m)


def test_canonical_beyond_limit_rejected(small_table):
    with pytest.raises(ValueError):
        canonical_partition(small_table.limit + 1, small_table)


def test_exceptional_15(small_table):
    part = exceptional_partition(15, small_table)
    assert part.members(1).tolist() == [2, 4, 6, 8, 10, 12, 14, 15]
    assert part.members(2).tolist() == [3, 9]


def test_exceptional_9(small_table):
    part = exceptional_partition(9, small_table)
    assert part.members(1).tolist() == [2, 4, 6, 8, 9]
    assert part.members(2).tolist() == [3]
    assert part.members(3).tolist() == [5]
    assert part.members(4).tolist() == [7]


def test_exceptional_class2_size_rule(small_table):
    # after moving n out, class 2 holds the odd multiples of 3 below n:
    # (n-3)/6 of them
    for n in range(9, 2001, 6):
        part = exceptional_partition(n, small_table)
        assert part.class_sizes.get(2, 0) == (n - 3) // 6, n


def test_exceptional_rejects_wrong_shape(small_table):
    with pytest.raises(ValueError):
        exceptional_partition(12, small_table)
    with pytest.raises(ValueError):
        exceptional_partition(25, small_table)


# ------------------------------------------------------------------ conflicts

def test_conflicts_canonical_4(small_table):
    assert count_conflicts(canonical_partition(4, small_table)) == 0


def test_conflicts_canonical_15(small_table):
    part = canonical_partition(15, small_table)
    assert count_conflicts(part) == 10
    label_of = {m: part.label(m) for m in range(2, 16)}
    assert naive_conflicts(15, label_of) == 10


def test_conflicts_singletons_of_2_3():
    part = Partition(3, np.array([1, 2], dtype=np.int64))
    assert count_conflicts(part) == 0


def test_conflicts_guard(small_table):
    part = canonical_partition(600, small_table)
    with pytest.raises(ResourceGuardError):
        count_conflicts(part, guard=500)
    assert count_conflicts(part, guard=600) >= 0


def test_canonical_beats_singletons(small_table):
    """From the first friendship on, clustering beats isolating everything."""
    n_max = 2000
    values = np.arange(2, n_max + 1, dtype=np.int64)
    labels = canonical_partition(n_max, small_table).labels
    canonical = 0
    singleton = 0
    for m in range(3, n_max + 1):
        prev = values[: m - 2]
        friend = np.gcd(prev, m) > 1
        n_friends = int(np.count_nonzero(friend))
        singleton += n_friends  # every friendship is a conflict for singletons
        same = labels[: m - 2] == labels[m - 2]
        canonical += int(np.count_nonzero(friend != same))
        if m >= 6:
            assert canonical < singleton, m


# ---------------------------------------------------------------- move deltas

def _full_tallies(part: Partition, n: int) -> dict[int, ClassTally]:
    """Exact tallies of n against every class of part, n excluded, by gcd scan."""
    tallies = {}
    for cid in part.class_sizes:
        friends = enemies = 0
        for m in part.members(cid):
            if m == n:
                continue
            if gcd(int(m), n) > 1:
                friends += 1
            else:
                enemies += 1
        tallies[cid] = ClassTally(cid, n, friends, enemies)
    return tallies


def test_delta_identity_move(small_table):
    part = canonical_partition(15, small_table)
    tallies = _full_tallies(part, 15)
    assert conflict_delta_of_move(15, 2, 2, tallies, partition=part) == 0


def test_delta_9_to_even_class(small_table):
    part = canonical_partition(9, small_table)
    tallies = _full_tallies(part, 9)
    assert conflict_delta_of_move(9, 2, 1, tallies, partition=part) == 3


def test_delta_at_first_irregular(table):
    """The one-element move that beats the canonical clustering, scored from
    closed-form tallies: moving the first irregular integer to the evens
    removes 686785 conflicts."""
    n = FIRST_IRREGULAR
    t1 = tally_even_class(n, factorize(n, table))
    s2 = (n - 3) // 6  # odd multiples of 3 below n, all friends
    tallies = {1: t1, 2: ClassTally(2, n, s2, 0)}
    delta = conflict_delta_of_move(n, 2, 1, tallies)
    assert delta == s2 - t1.diff
    assert delta == -686785
    assert delta < 0


def test_delta_matches_brute_force_on_random_partitions(small_table):
    rng = random.Random(99)
    for trial in range(40):
        n_max = rng.randrange(8, 60)
        n_classes = rng.randrange(1, 6)
        labels = np.array([rng.randrange(1, n_classes + 1) for _ in range(n_max - 1)],
                          dtype=np.int64)
        part = Partition(n_max, labels)
        n = rng.randrange(2, n_max + 1)
        frm = part.label(n)
        targets = list(part.class_sizes) + [max(part.class_sizes) + 1]
        to = rng.choice(targets)
        tallies = _full_tallies(part, n)
        if to not in tallies:
            tallies[to] = ClassTally(to, n, 0, 0)
        before = count_conflicts(part)
        moved = part.copy()
        moved.move(n, to)
        after = count_conflicts(moved)
        got = conflict_delta_of_move(n, frm, to, tallies)
        assert got == after - before, (n_max, n, frm, to)


def test_delta_requires_consistent_tallies(small_table):
    part = canonical_partition(9, small_table)
    tallies = _full_tallies(part, 9)
    bad = dict(tallies)
    bad[1] = ClassTally(1, 9, 99, 0)
    with pytest.raises(TallyInconsistencyError):
        conflict_delta_of_move(9, 2, 1, bad, partition=part)
    del tallies[3]
    with pytest.raises(TallyInconsistencyError):
        conflict_delta_of_move(9, 2, 1, tallies, partition=part)


def test_delta_missing_target_tally(small_table):
    part = canonical_partition(9, small_table)
    tallies = _full_tallies(part, 9)
    with pytest.raises(TallyInconsistencyError):
        conflict_delta_of_move(9, 2, 42, tallies)


# ------------------------------------------------------------------------ CSV

def test_csv_roundtrip(small_table):
    part = canonical_partition(50, small_table)
    text = partition_to_csv(part)
    back = read_partition_csv(io.StringIO(text))
    assert back.n == part.n
    assert np.array_equal(back.labels, part.labels)


def test_csv_golden_g15(small_table, data_dir):
    part = canonical_partition(15, small_table)
    golden = (data_dir / "g15.csv").read_text()
    assert partition_to_csv(part) == golden


def test_csv_rejects_bad_header():
    with pytest.raises(ValueError):
        read_partition_csv(io.StringIO("a,b\n2,1\n"))


def test_csv_rejects_gaps():
    with pytest.raises(ValueError):
        read_partition_csv(io.StringIO("integer,class\n2,1\n5,2\n"))
