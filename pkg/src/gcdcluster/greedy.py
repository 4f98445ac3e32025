"""The natural greedy clustering and the regularity verification sweep.

The greedy adjoins 2, 3, 4, ... in order, placing each n into the class where
it causes the fewest new conflicts; equivalently (and this is how everything
here scores moves) into the class maximizing friends-minus-enemies of n, with
ties broken toward the smallest class index and a fresh class counting as
index 0 with value 0.

Two run modes compute the same partitions:

* ``run_reference``   -- scores every class member by member with no
                         structural shortcuts; quadratic, guarded, trusted as
                         the ground-truth executable.
* ``run_accelerated`` -- exploits the regular structure: evens go to class 1,
                         primes open classes, and for odd composite n only the
                         classes up to n's smallest-prime-factor index can win,
                         scored by exact counting formulas.

``verify_range`` is the per-n formulation of the same question ("does n join
the class of its smallest prime factor?") that needs no running state, so a
sweep can fan out and still merge deterministically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from .counts import ClassTally, class_size, tally_diff_fast, tally_even_class
from .errors import ResourceGuardError, TallyInconsistencyError
from .partition import Partition
from .primes import PrimeTable, factorize, totient

DEFAULT_REFERENCE_GUARD = 100_000
# Past the first irregular point the canonical shortcuts are unsound, so the
# engine falls back to direct scans; above this n it stops verifying instead.
DEFAULT_NAIVE_BUDGET = 1_000_000


@dataclass
class GreedyState:
    """Snapshot of a greedy run after adjoining every integer up to m."""

    partition: Partition
    m: int
    mode: str  # "reference" | "accelerated"
    anomalies: list[tuple[int, int, int]] = field(default_factory=list)  # (n, expected, chosen)
    unverified: list[int] = field(default_factory=list)
    conflicts: int = 0


@dataclass
class VerifyRecord:
    """Outcome of the class-selection check for one odd composite n."""

    n: int
    spf_index: int
    deltas: dict[int, int]  # j -> friends-minus-enemies (j = spf_index: class size)
    chosen_j: int
    expected_j: int

    @property
    def status(self) -> str:
        return "pass" if self.chosen_j == self.expected_j else "fail"

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "spf_index": self.spf_index,
            "deltas": {str(j): d for j, d in sorted(self.deltas.items())},
            "chosen_j": self.chosen_j,
            "expected_j": self.expected_j,
            "status": self.status,
        })


@dataclass
class VerifyReport:
    start: int
    stop: int
    checked: int = 0
    auto_passed: int = 0
    anomalies: list[tuple[int, int, int]] = field(default_factory=list)
    unverified: list[int] = field(default_factory=list)
    records: list[VerifyRecord] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return not self.anomalies and not self.unverified

    def summary_json(self) -> str:
        return json.dumps({
            "summary": {
                "from": self.start,
                "to": self.stop,
                "checked": self.checked,
                "auto_passed": self.auto_passed,
                "anomalies": [list(a) for a in self.anomalies],
                "unverified": self.unverified,
                "all_pass": self.all_pass,
            }
        })


def _argmax_min_index(values: list[int]) -> int:
    """Index of the maximum, smallest index on ties (values[0] is class 0)."""
    best_j = 0
    best = values[0]
    for j in range(1, len(values)):
        if values[j] > best:
            best = values[j]
            best_j = j
    return best_j


def greedy_step(state: GreedyState, n: int, tallies: dict[int, ClassTally]) -> GreedyState:
    """Adjoin n to the partition using caller-supplied exact tallies.

    ``tallies`` must cover every existing class; the empty class 0 defaults to
    a (0, 0) tally.  Returns a new state; the input state is not modified.
    The chosen class maximizes friends-minus-enemies with smallest-index
    tie-break, and the conflict counter grows by the enemies kept plus the
    friends separated.
    """
    if n != state.m + 1:
        raise ValueError(f"next integer must be {state.m + 1}, got {n}")
    part = state.partition
    existing = sorted(part.class_sizes)
    missing = [c for c in existing if c not in tallies]
    if missing:
        raise TallyInconsistencyError(f"missing tallies for classes {missing}")
    covered = sum(tallies[c].total for c in existing)
    if covered != n - 2:
        raise TallyInconsistencyError(
            f"tally totals sum to {covered}, expected {n - 2}")
    ids = [0] + existing
    values = [0] + [tallies[c].diff for c in existing]
    chosen = ids[_argmax_min_index(values)]
    total_friends = sum(tallies[c].friends for c in existing)
    if chosen == 0:
        new_id = max(existing) + 1 if existing else 1
        added = total_friends
    else:
        new_id = chosen
        t = tallies[chosen]
        added = t.enemies + (total_friends - t.friends)
    labels = np.append(part.labels, np.int64(new_id))
    return GreedyState(
        partition=Partition(n, labels),
        m=n,
        mode=state.mode,
        anomalies=list(state.anomalies),
        unverified=list(state.unverified),
        conflicts=state.conflicts + added,
    )


def initial_state(mode: str = "reference") -> GreedyState:
    """The run start: {2} alone in class 1, zero conflicts."""
    part = Partition(2, np.array([1], dtype=np.int64))
    return GreedyState(partition=part, m=2, mode=mode)


def _fill_friend_mask(mask: np.ndarray, m: int, primes_of_m) -> None:
    """mask[a - 2] = True for every friend a < m, i.e. every multiple of a
    prime divisor of m (the definition of friendship, stride by stride)."""
    k = m - 2
    mask[:k] = False
    for q in primes_of_m:
        mask[q - 2 : k : q] = True


def _scan_step(lab: np.ndarray, friend: np.ndarray,
               max_id: int) -> tuple[int, int, int]:
    """Score one greedy step member by member against any labeling.

    ``friend[a-2]`` says whether a is a friend of the incoming integer; every
    class is scored as friends-minus-enemies and the new-conflict count for
    the winner is total friends minus its score (separated friends plus kept
    enemies).  Returns (chosen class or 0 for fresh, new conflicts, friends).
    """
    w = np.where(friend, 1.0, -1.0)
    diffs = np.bincount(lab, weights=w, minlength=max_id + 1)
    diffs[0] = 0.0  # slot 0 is the fresh-class candidate
    chosen = int(np.argmax(diffs))  # first max: the smallest-index tie-break
    b_total = int(np.count_nonzero(friend))
    added = b_total - int(diffs[chosen])
    return chosen, added, b_total


def _local_spf(limit: int) -> np.ndarray:
    """Smallest-prime-factor array, self-contained so the reference run does
    not depend on the shared prime machinery it serves as an oracle for."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for q in range(2, isqrt(limit) + 1):
        if spf[q] == 0:
            sl = spf[q * q :: q]
            sl[sl == 0] = q
    rest = np.flatnonzero(spf[2:] == 0) + 2
    spf[rest] = rest
    return spf


def _distinct_primes_chase(m: int, spf: np.ndarray) -> list[int]:
    out = []
    while m > 1:
        q = int(spf[m])
        out.append(q)
        while m % q == 0:
            m //= q
    return out


def run_reference(n: int, guard: int = DEFAULT_REFERENCE_GUARD) -> GreedyState:
    """Greedy run scored member by member over all previous integers.

    Every existing class is scored at every step with no structural
    shortcuts, so this run is the executable ground truth the accelerated
    mode is checked against.  Quadratic work, refused above ``guard``.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if n > guard:
        raise ResourceGuardError(
            f"reference greedy at n={n} refused (guard {guard})")
    spf = _local_spf(n)
    labels = np.zeros(n - 1, dtype=np.int64)
    labels[0] = 1
    mask = np.zeros(n - 1, dtype=bool)
    next_id = 1
    conflicts = 0
    for m in range(3, n + 1):
        _fill_friend_mask(mask, m, _distinct_primes_chase(m, spf))
        chosen, added, _ = _scan_step(labels[: m - 2], mask[: m - 2], next_id)
        if chosen == 0:
            next_id += 1
            chosen = next_id
        labels[m - 2] = chosen
        conflicts += added
    state = GreedyState(partition=Partition(n, labels), m=n, mode="reference")
    state.conflicts = conflicts
    return state


def run_accelerated(n: int, table: PrimeTable,
                    naive_budget: int = DEFAULT_NAIVE_BUDGET) -> GreedyState:
    """Greedy run using the structural shortcuts, exact at every step.

    While the partition stays canonical: even n joins class 1, prime n opens
    the class of its prime index, and an odd composite n with smallest prime
    factor index i is scored only against classes 0..i (no larger class can
    beat class i: friends-minus-enemies there is at most the class size,
    which is at most |S_i|, and ties resolve to the smaller index).

    A step whose winner differs from class i is recorded as an anomaly and the
    run continues with the actual winner, but then the canonical shortcuts are
    no longer sound, so later steps degrade to member-by-member scans; steps
    beyond ``naive_budget`` in that regime are recorded as unverified and
    labeled by the canonical rule.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if n > table.limit:
        raise ValueError(f"n={n} exceeds table limit {table.limit}")
    labels = np.zeros(n - 1, dtype=np.int64)
    labels[0] = 1
    mask = None  # friend-mask buffer, allocated only if a step degrades
    conflicts = 0
    anomalies: list[tuple[int, int, int]] = []
    unverified: list[int] = []
    canonical = True
    max_id = 1
    for m in range(3, n + 1):
        if canonical:
            f = factorize(m, table)
            qs = f.distinct_primes
            phi_m = totient(f)
            b_total = m - 1 - phi_m
            if m % 2 == 0:
                chosen = 1
                b_chosen = (m - 2) // 2  # every smaller even is a friend
                e_chosen = 0
            elif qs[0] == m:
                chosen = 0
                b_chosen = e_chosen = 0
            else:
                i = table.prime_index(qs[0])
                vals = [0, tally_even_class(m, f).diff]
                for j in range(2, i):
                    vals.append(tally_diff_fast(j, m, qs, table))
                s_i = class_size(i, m - 1, table)
                vals.append(s_i)
                chosen = _argmax_min_index(vals)
                if chosen == i:
                    b_chosen, e_chosen = s_i, 0
                else:
                    # class i scores s_i >= 1 > 0, so a fresh class never wins here
                    if chosen == 1:
                        t = tally_even_class(m, f)
                    else:
                        # recover the tally pair from the diff and the class size
                        s_j = class_size(chosen, m - 1, table)
                        t = ClassTally(chosen, m, (s_j + vals[chosen]) // 2,
                                       (s_j - vals[chosen]) // 2)
                    b_chosen, e_chosen = t.friends, t.enemies
                    anomalies.append((m, i, chosen))
                    canonical = False
            if chosen == 0:
                new_id = table.prime_index(m) if qs[0] == m else max_id + 1
                labels[m - 2] = new_id
                max_id = max(max_id, new_id)
                conflicts += b_total
            else:
                labels[m - 2] = chosen
                max_id = max(max_id, chosen)
                conflicts += e_chosen + (b_total - b_chosen)
        elif m <= naive_budget:
            if mask is None:
                mask = np.zeros(n - 1, dtype=bool)
            f = factorize(m, table)
            _fill_friend_mask(mask, m, f.distinct_primes)
            chosen, added, _ = _scan_step(labels[: m - 2], mask[: m - 2], max_id)
            if chosen == 0:
                chosen = max_id + 1
            labels[m - 2] = chosen
            max_id = max(max_id, chosen)
            conflicts += added
        else:
            # too large to score against a non-canonical partition: label by
            # the canonical rule and say so
            unverified.append(m)
            f = factorize(m, table)
            if f.distinct_primes[0] == m:
                new_id = max_id + 1
                labels[m - 2] = new_id
                max_id = new_id
            else:
                labels[m - 2] = table.prime_index(f.distinct_primes[0])
    state = GreedyState(partition=Partition(n, labels), m=n, mode="accelerated",
                        anomalies=anomalies, unverified=unverified)
    state.conflicts = conflicts
    return state


def verify_single(n: int, table: PrimeTable) -> VerifyRecord | None:
    """Class-selection check for one integer against the canonical state.

    Returns None for even or prime n (those choices follow from parity and
    primality alone).  For an odd composite with smallest-prime-factor index
    i, computes friends-minus-enemies exactly for every class below i plus
    the size of class i, and reports which class a greedy step would pick.
    """
    if n % 2 == 0:
        return None
    f = factorize(n, table)
    qs = f.distinct_primes
    if qs[0] == n:
        return None
    i = table.prime_index(qs[0])
    phi_n = totient(f)
    deltas: dict[int, int] = {1: (n - 1) // 2 - phi_n}
    for j in range(2, i):
        deltas[j] = tally_diff_fast(j, n, qs, table)
    s_i = class_size(i, n - 1, table)
    deltas[i] = s_i
    vals = [0] + [deltas[j] for j in range(1, i + 1)]
    chosen = _argmax_min_index(vals)
    return VerifyRecord(n=n, spf_index=i, deltas=deltas, chosen_j=chosen,
                        expected_j=i)


def verify_range(start: int, stop: int, table: PrimeTable,
                 collect_records: bool = False, jsonl_fh=None,
                 progress=None) -> VerifyReport:
    """Check every n in [start, stop] for canonical class selection.

    Even and prime n auto-pass; each odd composite gets an exact check.  The
    per-n work is independent, so disjoint ranges can run anywhere and their
    reports merge deterministically (records are emitted in increasing n).

    The table must cover sqrt(stop) (factorization) and stop // 13 (the
    largest prime-count lookup the counting recursion can make: classes at
    wheel indices resolve without lookups, so arguments are at most n/13).
    """
    if start < 2 or stop < start:
        raise ValueError(f"bad range [{start}, {stop}]")
    if isqrt(stop) > table.limit or stop // 13 > table.limit:
        raise ValueError(
            f"table limit {table.limit} too small to verify up to {stop}; "
            f"need at least max(isqrt(stop), stop // 13)")
    report = VerifyReport(start=start, stop=stop)
    report.auto_passed += stop // 2 - (start - 1) // 2  # the evens
    first_odd = start if start % 2 == 1 else start + 1
    for n in range(first_odd, stop + 1, 2):
        rec = verify_single(n, table)
        if rec is None:
            report.auto_passed += 1
            continue
        report.checked += 1
        if rec.status == "fail":
            report.anomalies.append((rec.n, rec.expected_j, rec.chosen_j))
        if collect_records:
            report.records.append(rec)
        if jsonl_fh is not None:
            jsonl_fh.write(rec.to_json() + "\n")
        if progress is not None and report.checked % 20000 == 0:
            progress(n, report)
    if jsonl_fh is not None:
        jsonl_fh.write(report.summary_json() + "\n")
    return report
