"""Threshold analysis: where can the greedy leave the regular clustering?

For odd n divisible by 3, the greedy prefers the even class over the class of
3 exactly when the product of (1 - 1/q) over n's prime divisors beyond 3 drops
below 1/2.  That criterion ignores exponents, so the smallest crossing point
is a product of consecutive odd primes; walking those products finds the first
irregular integer 111_546_435 instantly.

For larger smallest-prime-factor indices the exact criterion is replaced by a
sufficient threshold n1(i, j, t): any n at least n1 with t distinct prime
factors starting at the i-th prime provably cannot land in class j.  Cells
where n1 does not exceed the smallest possible such n certify the whole (i, t)
family at once ("infeasible": no candidate escapes); the remaining cells leave
finitely many candidates below n1, which the census enumerates for the
three-prime-factor hunt.

All threshold arithmetic is exact rational; ceilings and floors are taken on
integer numerators and denominators, never through floating point.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import DegenerateThresholdError
from .primes import Factorization, PrimeTable, factorize, pi_exact, rosser_schoenfeld_bounds

# 3*5*7*11*13*17*19*23: the first integer the greedy clusters irregularly.
FIRST_IRREGULAR = 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23

# An odd multiple of 3 joins the even class iff prod_{k>=2}(1 - 1/q_k) < 1/2.
# The analogous criterion for odd n with smallest prime 5 (the even class must
# beat the class of 5, whose density below n is 1/15) works out to 13/24:
# (n-1)/2 - phi(n) > n/15  <=>  phi(n)/n < 13/30  <=>  prod_{k>=2} < 13/24.
_EVEN_BEATS_CLASS3 = Fraction(13, 24)

# Published counts of three-prime-factor candidates, for reporting
# residuals of the calibrated interpretation (see census_report).
_REPORTED_CENSUS = {19: 4, 23: 18, 29: 65, 31: 216, 37: 513, 41: 1302, 43: 3097, 67: 90338}


@dataclass(frozen=True)
class ThresholdRecord:
    """One cell of the threshold table.

    ``infeasible`` means the threshold certifies every candidate: n1 is at
    most the product of the t consecutive primes starting at p_i, i.e. no
    integer with that factor signature can violate the class-i selection.
    """

    i: int
    j: int
    t: int
    n1: int
    infeasible: bool


@dataclass(frozen=True)
class CandidateCensus:
    """Count of integers below ``bound`` divisible by p with exactly three
    distinct prime divisors, all at least p."""

    p: int
    bound: int
    count: int


def even_class_criterion(f: Factorization) -> bool:
    """Exponent-free criterion: does this integer prefer the even class?

    Requires an odd n divisible by 3 (smallest prime divisor exactly 3).
    True iff prod over the remaining prime divisors of (1 - 1/q) < 1/2,
    evaluated as 2 * prod(q - 1) < prod(q) in exact integers.
    """
    qs = f.distinct_primes
    if not qs or qs[0] != 3:
        raise ValueError(f"criterion needs smallest prime divisor 3, got {f.n}")
    num = den = 1
    for q in qs[1:]:
        num *= q - 1
        den *= q
    return 2 * num < den


def find_n0(search_bound: int, table: PrimeTable) -> int | None:
    """Smallest odd multiple of 3 up to ``search_bound`` preferring class 1.

    Searches squarefree kernels (products of distinct odd primes including 3)
    depth-first in increasing primes.  Two prunings collapse the tree: once a
    kernel qualifies, every extension is a larger qualifying kernel, and from
    any non-qualifying node the cheapest qualifying completion uses the
    consecutive primes that follow (any other choice grows both the product
    and the criterion value).  So each subtree's minimum is its consecutive
    completion, and the global minimum is the consecutive completion from 3.
    Returns None when nothing below the bound qualifies.
    """
    if search_bound < 3:
        return None
    product = 3
    num = den = 1  # running prod (q-1)/q over primes beyond 3
    idx = 3  # next prime index: p_3 = 5
    while 2 * num >= den:  # criterion not yet satisfied
        q = table.prime(idx)
        product *= q
        if product > search_bound:
            return None
        num *= q - 1
        den *= q
        idx += 1
    return product


def n1_remark_candidate(table: PrimeTable) -> int:
    """The analogous first-irregular candidate among multiples of 5.

    Returns 5 * p_4 * ... * p_14 and checks the class-3 analogue of the
    exponent-free criterion: it must hold for the full kernel and fail with
    the last prime dropped (otherwise a smaller candidate would exist).
    """
    primes = [table.prime(k) for k in range(4, 15)]
    value = 5
    for q in primes:
        value *= q
    if not _beats_class3(primes):
        raise AssertionError("criterion unexpectedly fails for the full kernel")
    if _beats_class3(primes[:-1]):
        raise AssertionError("criterion unexpectedly holds without the last prime")
    return value


def _beats_class3(qs) -> bool:
    """prod (1 - 1/q) < 13/24 over the given primes, exact."""
    num = den = 1
    for q in qs:
        num *= q - 1
        den *= q
    return num * _EVEN_BEATS_CLASS3.denominator < den * _EVEN_BEATS_CLASS3.numerator


def threshold_T(i: int, j: int, t: int, table: PrimeTable) -> Fraction:
    """The per-integer margin density between class i and class j.

    T = (1/p_i) prod_{l<i}(1 - 1/p_l)
      + (1/p_j) prod_{l<j}(1 - 1/p_l) * (2 prod_k(1 - 1/q_k) - 1)

    with q_1..q_t the t consecutive primes starting at p_i (that choice
    minimizes the product term, making the derived threshold safe for every
    admissible divisor set).
    """
    term_i = Fraction(1, table.prime(i))
    for l in range(1, i):
        pl = table.prime(l)
        term_i *= Fraction(pl - 1, pl)
    prod_q = Fraction(1)
    for k in range(t):
        q = table.prime(i + k)
        prod_q *= Fraction(q - 1, q)
    term_j = Fraction(1, table.prime(j))
    for l in range(1, j):
        pl = table.prime(l)
        term_j *= Fraction(pl - 1, pl)
    term_j *= 2 * prod_q - 1
    return term_i + term_j


def n1_table(i: int, j: int, t: int, table: PrimeTable) -> ThresholdRecord:
    """Threshold cell n1(i, j, t) with its certification flag.

    n1 = floor((2**(t+j-2) + 2**(i-2)) / T) in exact rational arithmetic.
    ``infeasible`` is set when n1 is at most the product of the t consecutive
    primes starting at p_i: then every actual candidate already clears the
    threshold and the (i, t) family is certified wholesale.
    """
    if not (j >= 1 and i > j and t >= 1):
        raise ValueError(f"need i > j >= 1 and t >= 1, got (i={i}, j={j}, t={t})")
    T = threshold_T(i, j, t, table)
    if T <= 0:
        raise DegenerateThresholdError(
            f"threshold density T <= 0 for (i={i}, j={j}, t={t}); no finite bound")
    error_budget = (1 << (t + j - 2)) + (1 << (i - 2))
    n1 = error_budget * T.denominator // T.numerator
    smallest_candidate = 1
    for k in range(t):
        smallest_candidate *= table.prime(i + k)
    return ThresholdRecord(i=i, j=j, t=t, n1=int(n1),
                           infeasible=n1 <= smallest_candidate)


def table1_records(table: PrimeTable,
                   horizon: int = FIRST_IRREGULAR) -> list[ThresholdRecord]:
    """All displayed threshold cells n1(i, i-1, t).

    A cell (i, t) is displayed while both the smallest candidate (product of
    t consecutive primes from p_i) and the threshold itself stay within the
    horizon; everything beyond cannot matter below the first irregularity.
    """
    records = []
    for i in range(3, 21):
        t = 1
        while True:
            smallest = 1
            for k in range(t):
                smallest *= table.prime(i + k)
            if smallest > horizon:
                break
            rec = n1_table(i, i - 1, t, table)
            if rec.n1 > horizon:
                break
            records.append(rec)
            t += 1
    return records


def three_factor_candidates(p: int, bound: int, table: PrimeTable) -> list[int]:
    """All n < bound with n = p*q*r, p < q < r prime (distinct-prime reading).

    Sorted ascending.  With multiplicities allowed no additional integers fit
    below any of the calibrated bounds, so the distinct reading is also the
    exhaustive one there (property-tested).
    """
    table.prime_index(p)  # validates p is a stored prime
    out = []
    primes = table._primes_list
    iq = bisect.bisect_right(primes, p)
    while iq + 1 < len(primes):
        q = primes[iq]
        if p * q * primes[iq + 1] >= bound:
            break
        lim = (bound - 1) // (p * q)
        ir = iq + 1
        while ir < len(primes) and primes[ir] <= lim:
            out.append(p * q * primes[ir])
            ir += 1
        iq += 1
    out.sort()
    return out


def census_three_factor(p: int, bound: int | None, table: PrimeTable,
                        distinct_only: bool = True) -> CandidateCensus:
    """Count the three-prime-factor candidates for prime p below ``bound``.

    Default bound: the class-certification threshold n1(i, i-1, 3) for p's
    index i, capped at the first irregular integer (candidates beyond it are
    moot).  ``distinct_only=False`` additionally counts integers with the
    same three distinct primes but higher multiplicity.
    """
    i = table.prime_index(p)
    if bound is None:
        bound = min(n1_table(i, i - 1, 3, table).n1, FIRST_IRREGULAR)
    if distinct_only:
        count = len(three_factor_candidates(p, bound, table))
    else:
        count = _count_with_multiplicity(p, bound, table)
    return CandidateCensus(p=p, bound=bound, count=count)


def _count_with_multiplicity(p: int, bound: int, table: PrimeTable) -> int:
    """Integers n < bound, spf = p, exactly three distinct primes >= p."""
    primes = table._primes_list
    count = 0
    stack = []
    ip = bisect.bisect_left(primes, p)
    v = p
    while v < bound:
        stack.append((v, ip, 1))
        v *= p
    while stack:
        value, last, npr = stack.pop()
        if npr == 3:
            count += 1
        if npr >= 3:
            continue
        k = last + 1
        while k < len(primes) and value * primes[k] < bound:
            q = primes[k]
            v = value * q
            while v < bound:
                stack.append((v, k, npr + 1))
                v *= q
            k += 1
    return count


def census_report(table: PrimeTable, ps=(19, 23, 29, 31, 37, 41, 43),
                  include_remark_prime: bool = False) -> list[dict]:
    """Census rows with calibration bookkeeping against the reported counts.

    The calibrated interpretation (bound = n1(i, i-1, 3) capped at the first
    irregular integer, distinct three primes, strict upper bound) reproduces
    the seven reported counts for p = 19..43 exactly.  No interpretation we
    tried reproduces the reported 90338 for p = 67; the row reports the
    calibrated count and the residual rather than adjusting anything.
    """
    rows = []
    wanted = list(ps) + ([67] if include_remark_prime else [])
    for p in wanted:
        c = census_three_factor(p, None, table)
        reported = _REPORTED_CENSUS.get(p)
        rows.append({
            "p": p,
            "bound": c.bound,
            "count": c.count,
            "reported": reported,
            "residual": None if reported is None else c.count - reported,
        })
    return rows


def prime_count_inequality(x_grid, t_grid, table: PrimeTable) -> list[dict]:
    """Check pi(x) - pi(sqrt(x)) > 18 pi(x/t) + 56 on a grid, exactly.

    Each row reports the exact counts, the margin, and whether the classical
    two-sided prime-counting bracket alone already suffices (lower(x) -
    upper(sqrt x) > 18 upper(x/t) + 56).  Points with x beyond the table get
    the bracket check only and are flagged inexact.
    """
    min_x = FIRST_IRREGULAR ** (2.0 / 3.0)
    rows = []
    for x in x_grid:
        if x < min_x - 1e-9:
            raise ValueError(f"x={x} below the inequality's domain {min_x:.1f}")
        for t in t_grid:
            if t < 41:
                raise ValueError(f"t={t} below the inequality's domain 41")
            xf = int(x)
            sq = isqrt(xf)
            quot = int(x / t)
            row = {"x": x, "t": t}
            if xf <= table.limit:
                pi_x = pi_exact(xf, table)
                pi_sq = pi_exact(sq, table)
                pi_q = pi_exact(quot, table)
                lhs = pi_x - pi_sq
                rhs = 18 * pi_q + 56
                row.update({"pi_x": pi_x, "pi_sqrt": pi_sq, "pi_quot": pi_q,
                            "lhs": lhs, "rhs": rhs, "margin": lhs - rhs,
                            "holds": lhs > rhs, "exact": True})
            else:
                row.update({"exact": False})
            if sq >= 59 and quot >= 59:
                lo_x, _ = rosser_schoenfeld_bounds(float(x))
                _, up_sq = rosser_schoenfeld_bounds(float(sq))
                _, up_q = rosser_schoenfeld_bounds(float(quot))
                row["rs_sufficient"] = lo_x - up_sq > 18 * up_q + 56
            else:
                row["rs_sufficient"] = None
            rows.append(row)
    return rows


def proposition_census(n: int, ell: int, table: PrimeTable) -> tuple[int, int]:
    """Friend/enemy bounds for large-prime n against a class below it.

    For n below the first irregular integer with every prime divisor at least
    41, and a class index ell with 37 <= p_ell < smallest divisor of n:
    returns (friends_bound, enemies_bound) where the friends of n in class
    ell number at most 52 + 18 pi(N/(p_ell q1)) and the enemies at least
    pi(N/p_ell) - pi(p_ell) - 4, N the first irregular integer.  Callers
    assert friends_bound < enemies_bound.
    """
    if n >= FIRST_IRREGULAR:
        raise ValueError(f"n={n} is not below the first irregular integer")
    f = factorize(n, table)
    qs = f.distinct_primes
    if qs[0] < 41:
        raise ValueError(f"n={n} has a prime divisor {qs[0]} < 41")
    big_omega = sum(a for _, a in f.factors)
    if big_omega > 4:
        raise ValueError(f"n={n} has {big_omega} prime divisors with multiplicity")
    p_ell = table.prime(ell)
    if not (37 <= p_ell < qs[0]):
        raise ValueError(f"need 37 <= p_ell < {qs[0]}, got p_ell={p_ell}")
    q1 = qs[0]
    friends_bound = 52 + 18 * pi_exact(FIRST_IRREGULAR // (p_ell * q1), table)
    enemies_bound = (pi_exact(FIRST_IRREGULAR // p_ell, table)
                     - pi_exact(p_ell, table) - 4)
    return friends_bound, enemies_bound


def table1_csv(records, table: PrimeTable) -> str:
    lines = ["i,p,t,n1,infeasible"]
    for r in records:
        lines.append(f"{r.i},{table.prime(r.i)},{r.t},{r.n1},{int(r.infeasible)}")
    return "\n".join(lines) + "\n"


def census_csv(censuses) -> str:
    lines = ["p,count"]
    for c in censuses:
        lines.append(f"{c.p},{c.count}")
    return "\n".join(lines) + "\n"
