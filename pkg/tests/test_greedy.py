"""Greedy runs, step selection, and the regularity verification."""

import io
import json
import random
from math import gcd

import numpy as np
import pytest

from gcdcluster import (
    ClassTally,
    ResourceGuardError,
    TallyInconsistencyError,
    canonical_partition,
    count_conflicts,
    greedy_step,
    initial_state,
    run_accelerated,
    run_reference,
    verify_range,
    verify_single,
)
from gcdcluster.greedy import _scan_step
from oracles import naive_greedy

FIRST_IRREGULAR = 111546435


# ------------------------------------------------------------------ the steps

def _tallies_by_scan(labels_by_int: dict[int, int], n: int) -> dict[int, ClassTally]:
    out: dict[int, tuple[int, int]] = {}
    for m, cls in labels_by_int.items():
        f, e = out.get(cls, (0, 0))
        if gcd(m, n) > 1:
            out[cls] = (f + 1, e)
        else:
            out[cls] = (f, e + 1)
    return {c: ClassTally(c, n, f, e) for c, (f, e) in out.items()}


def test_step_3_opens_a_class():
    st = initial_state()
    st = greedy_step(st, 3, {1: ClassTally(1, 3, 0, 1)})
    assert st.partition.label(2) == 1 and st.partition.label(3) == 2
    assert st.conflicts == 0


def test_step_4_joins_the_evens():
    st = initial_state()
    st = greedy_step(st, 3, {1: ClassTally(1, 3, 0, 1)})
    st = greedy_step(st, 4, {1: ClassTally(1, 4, 1, 0), 2: ClassTally(2, 4, 0, 1)})
    assert st.partition.label(4) == 1
    assert st.conflicts == 0


def test_step_9_joins_class_of_3(small_table):
    st = run_reference(8)
    labels = {m: st.partition.label(m) for m in range(2, 9)}
    tallies = _tallies_by_scan(labels, 9)
    assert [tallies[c].diff for c in sorted(tallies)] == [-2, 1, -1, -1]
    st9 = greedy_step(st, 9, tallies)
    assert st9.partition.label(9) == 2
    assert st9.conflicts == st.conflicts + 1


def test_step_requires_consecutive_n():
    st = initial_state()
    with pytest.raises(ValueError):
        greedy_step(st, 5, {})


def test_step_requires_full_tallies():
    st = initial_state()
    with pytest.raises(TallyInconsistencyError):
        greedy_step(st, 3, {})
    with pytest.raises(TallyInconsistencyError):
        greedy_step(st, 3, {1: ClassTally(1, 3, 4, 4)})


def test_scan_step_matches_definition():
    # moving target: arbitrary labeling, chosen class must minimize new
    # conflicts with the smallest-index tie-break; the friend mask is fed
    # from per-element gcds, the definition itself
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randrange(4, 40)
        labels = np.array([rng.randrange(1, 5) for _ in range(n - 2)], dtype=np.int64)
        friend = np.array([gcd(a, n) > 1 for a in range(2, n)])
        chosen, added, friends = _scan_step(labels, friend, 5)
        scores = {0: sum(1 for a in range(2, n) if gcd(a, n) > 1)}
        for cid in range(1, 6):
            members = [a for a in range(2, n) if labels[a - 2] == cid]
            ke = sum(1 for a in members if gcd(a, n) == 1)
            kf = len(members) - ke
            scores[cid] = ke + (scores[0] - kf)
        best = min(scores.values())
        want = min(c for c, s in scores.items() if s == best)
        assert (chosen, added) == (want, best)


# ------------------------------------------------------------------- the runs

def test_reference_small_partitions_match_listing():
    expects = {
        3: [{2}, {3}],
        4: [{2, 4}, {3}],
        5: [{2, 4}, {3}, {5}],
        6: [{2, 4, 6}, {3}, {5}],
        15: [{2, 4, 6, 8, 10, 12, 14}, {3, 9, 15}, {5}, {7}, {11}, {13}],
    }
    for n, classes in expects.items():
        st = run_reference(n)
        got = [set(st.partition.members(c).tolist())
               for c in sorted(st.partition.class_sizes)]
        assert got == classes, n


def test_reference_equals_set_based_oracle():
    for n in (2, 3, 10, 50, 137, 300):
        st = run_reference(n)
        oracle = naive_greedy(n)
        got = [set(st.partition.members(c).tolist())
               for c in sorted(st.partition.class_sizes)]
        assert got == oracle, n


def test_reference_guard():
    with pytest.raises(ResourceGuardError):
        run_reference(200_000)


def test_reference_conflicts_match_pair_count(small_table):
    for n in (6, 15, 100, 400):
        st = run_reference(n)
        assert st.conflicts == count_conflicts(st.partition), n


def test_reference_monotone_prefix():
    full = run_reference(300)
    for n in (50, 137, 299):
        partial = run_reference(n)
        assert np.array_equal(full.partition.labels[: n - 1], partial.partition.labels)


def test_modes_agree_to_2000(table):
    ref = run_reference(2000)
    acc = run_accelerated(2000, table)
    assert np.array_equal(ref.partition.labels, acc.partition.labels)
    assert ref.conflicts == acc.conflicts
    assert acc.anomalies == [] and acc.unverified == []


def test_modes_agree_random_mid_sizes(table):
    # one run per size; by the monotone prefix property each comparison
    # covers every n below it as well
    rng = random.Random(17)
    for n in sorted(rng.randrange(2_000, 20_001) for _ in range(3)):
        ref = run_reference(n)
        acc = run_accelerated(n, table)
        assert np.array_equal(ref.partition.labels, acc.partition.labels), n
        assert ref.conflicts == acc.conflicts, n


def test_accelerated_equals_canonical_and_corollaries(table):
    n = 5000
    st = run_accelerated(n, table)
    assert st.anomalies == []
    canon = canonical_partition(n, table)
    assert np.array_equal(st.partition.labels, canon.labels)
    labels = st.partition.labels
    ms = np.arange(2, n + 1)
    evens = ms % 2 == 0
    assert (labels[evens] == 1).all()  # every even lands in class 1
    for m in range(3, n + 1):
        i = table.prime_index(table.smallest_prime_factor(m))
        if table.is_prime(m):
            assert labels[m - 2] == i  # primes open their own class
        else:
            assert labels[m - 2] <= i  # nothing lands above its own index


def test_accelerated_conflicts_identity(table):
    st = run_accelerated(1200, table)
    assert st.conflicts == count_conflicts(st.partition)


# ------------------------------------------------------------- verify_single

def test_verify_single_skips_even_and_prime(table):
    assert verify_single(10, table) is None
    assert verify_single(97, table) is None


def test_verify_single_9(table):
    rec = verify_single(9, table)
    assert rec.spf_index == 2
    assert rec.deltas == {1: -2, 2: 1}
    assert rec.chosen_j == 2 and rec.expected_j == 2
    assert rec.status == "pass"


def test_verify_single_first_irregular(table):
    rec = verify_single(FIRST_IRREGULAR, table)
    assert rec.status == "fail"
    assert (rec.n, rec.expected_j, rec.chosen_j) == (FIRST_IRREGULAR, 2, 1)
    assert rec.deltas[1] == 19277857
    assert rec.deltas[2] == 18591072
    assert rec.deltas[1] > rec.deltas[2]


def test_verify_single_agrees_with_reference_choices(table):
    st = run_reference(2000)
    for n in range(9, 2001, 2):
        rec = verify_single(n, table)
        if rec is None:
            continue
        assert rec.chosen_j == st.partition.label(n), n
        assert rec.status == "pass"


# -------------------------------------------------------------- verify_range

def test_verify_range_counts(table):
    report = verify_range(2, 1000, table)
    assert report.checked + report.auto_passed == 999
    assert report.all_pass
    assert report.anomalies == [] and report.unverified == []


def test_verify_range_at_first_irregular(table):
    report = verify_range(FIRST_IRREGULAR, FIRST_IRREGULAR, table, collect_records=True)
    assert report.anomalies == [(FIRST_IRREGULAR, 2, 1)]
    assert not report.all_pass
    assert report.records[0].status == "fail"


def test_verify_range_bad_range(table):
    with pytest.raises(ValueError):
        verify_range(5, 4, table)


def test_verify_range_golden_jsonl(table, data_dir):
    buf = io.StringIO()
    verify_range(2, 1000, table, jsonl_fh=buf)
    golden = (data_dir / "verify_2_1000.jsonl").read_text()
    assert buf.getvalue() == golden
    # the stream is well-formed JSONL with a trailing summary
    lines = buf.getvalue().strip().split("\n")
    summary = json.loads(lines[-1])["summary"]
    assert summary["all_pass"] is True
    assert summary["checked"] == len(lines) - 1
