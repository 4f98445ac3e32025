"""Prime infrastructure: sieve, factorization, totient, exact prime counting.

Everything downstream leans on ``PrimeTable``: an immutable, once-built bundle
of the ordered primes up to a limit, a smallest-prime-factor array for fast
factorization, and exact pi(x) lookups.  Prime indices are 1-based throughout
(prime 1 is 2, prime 2 is 3, ...), matching the class indexing used by the
clustering modules.

A ``PrimeTable`` is safe to share between threads once constructed; nothing
here mutates it afterwards.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import isqrt, log

import numpy as np

from .errors import OutOfRangeError

# Large enough that every integer in the regular range of the greedy clustering
# (everything below the first irregular point, 111_546_435) can be sieved
# directly.  Big sweeps should pass an explicit limit sized to their needs.
DEFAULT_SIEVE_LIMIT = 200_000_000

# Smallest-prime-factor arrays above this size buy little (trial division by
# the stored primes is fast) and cost 4 bytes per integer, so cap by default.
DEFAULT_SPF_LIMIT = 10_000_000

_CACHE_VERSION = 1


@dataclass(frozen=True)
class Factorization:
    """n = product of q**a over ``factors``, q strictly increasing."""

    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def distinct_primes(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    @property
    def kernel(self) -> int:
        """Product of the distinct prime divisors (squarefree part)."""
        k = 1
        for q, _ in self.factors:
            k *= q
        return k


class PrimeTable:
    """Ordered primes up to ``limit`` plus an SPF array for fast factorization.

    ``primes`` is a sorted numpy int64 array.  ``prime(i)`` returns the i-th
    prime, 1-based.  ``spf_limit`` bounds the smallest-prime-factor array;
    factorization of larger integers falls back to trial division against the
    stored primes.
    """

    def __init__(self, limit: int, spf_limit: int | None = None,
                 _primes: np.ndarray | None = None):
        if limit < 2:
            raise ValueError(f"sieve limit must be >= 2, got {limit}")
        self.limit = int(limit)
        if _primes is not None:
            self.primes = _primes
        else:
            self.primes = _sieve_primes(self.limit)
        self._primes_list = self.primes.tolist()
        if spf_limit is None:
            spf_limit = min(self.limit, DEFAULT_SPF_LIMIT)
        self.spf_limit = int(min(spf_limit, self.limit))
        self._spf = _sieve_spf(self.spf_limit)

    def __repr__(self) -> str:
        return f"PrimeTable(limit={self.limit}, n_primes={len(self.primes)})"

    def prime(self, i: int) -> int:
        """The i-th prime, 1-based: prime(1) = 2, prime(2) = 3."""
        if i < 1 or i > len(self._primes_list):
            raise OutOfRangeError(f"prime index {i} outside table (1..{len(self._primes_list)})")
        return self._primes_list[i - 1]

    def prime_index(self, p: int) -> int:
        """1-based index of the prime p; raises if p is not a stored prime."""
        pos = int(np.searchsorted(self.primes, p))
        if pos >= len(self.primes) or self._primes_list[pos] != p:
            raise ValueError(f"{p} is not a prime <= {self.limit}")
        return pos + 1

    def is_prime(self, n: int) -> bool:
        if n < 2:
            return False
        if n <= self.spf_limit:
            return int(self._spf[n]) == n
        if n > self.limit:
            raise OutOfRangeError(f"{n} exceeds sieve limit {self.limit}")
        pos = int(np.searchsorted(self.primes, n))
        return pos < len(self.primes) and self._primes_list[pos] == n

    def pi(self, x: int) -> int:
        """Exact count of primes <= x."""
        if x < 0:
            return 0
        if x > self.limit:
            raise OutOfRangeError(f"pi({x}) exceeds sieve limit {self.limit}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def smallest_prime_factor(self, n: int) -> int:
        if n < 2:
            raise ValueError(f"need n >= 2, got {n}")
        if n <= self.spf_limit:
            return int(self._spf[n])
        for p in self._primes_list:
            if p * p > n:
                return n
            if n % p == 0:
                return p
        # survived every stored prime; conclusive only if they reach sqrt(n)
        if isqrt(n) <= self.limit:
            return n
        raise OutOfRangeError(f"cannot factor {n} with primes up to {self.limit}")


def build_prime_table(limit: int, spf_limit: int | None = None) -> PrimeTable:
    """Sieve all primes up to ``limit`` (inclusive).

    Raises ValueError for limit < 2.
    """
    return PrimeTable(limit, spf_limit=spf_limit)


def _sieve_primes(limit: int) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, isqrt(limit) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _sieve_spf(limit: int) -> np.ndarray:
    """spf[n] = smallest prime factor of n (spf[p] = p for primes), n >= 2."""
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for q in range(2, isqrt(limit) + 1):
        if spf[q] == 0:
            sl = spf[q * q :: q]
            sl[sl == 0] = q
    rest = np.flatnonzero(spf[2:] == 0) + 2
    spf[rest] = rest
    return spf


def factorize(n: int, table: PrimeTable) -> Factorization:
    """Distinct prime divisors of n with exponents, smallest first.

    Uses the SPF array when n is inside it, otherwise trial division by the
    stored primes.  Raises ValueError for n < 2 and OutOfRangeError when the
    table cannot certify the final cofactor prime.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    factors: list[tuple[int, int]] = []
    rem = n
    if n <= table.spf_limit:
        spf = table._spf
        while rem > 1:
            q = int(spf[rem])
            a = 0
            while rem % q == 0:
                rem //= q
                a += 1
            factors.append((q, a))
        return Factorization(n, tuple(factors))
    for q in table._primes_list:
        if q * q > rem:
            break
        if rem % q == 0:
            a = 0
            while rem % q == 0:
                rem //= q
                a += 1
            factors.append((q, a))
    if rem > 1:
        # rem has no prime factor <= sqrt(rem) among the stored primes
        if isqrt(rem) > table.limit:
            raise OutOfRangeError(
                f"cofactor {rem} of {n} not certifiable with primes up to {table.limit}")
        factors.append((rem, 1))
    return Factorization(n, tuple(factors))


def totient(f: Factorization) -> int:
    """Euler phi from a factorization, exact integer arithmetic."""
    result = f.n
    for q, _ in f.factors:
        result = result // q * (q - 1)
    return result


def pi_exact(x: int, table: PrimeTable) -> int:
    """Exact number of primes <= x (x must be within the table)."""
    if x < 1:
        raise ValueError(f"need x >= 1, got {x}")
    return table.pi(x)


def rosser_schoenfeld_bounds(x: float) -> tuple[float, float]:
    """Classical two-sided bracket for pi(x), valid for x >= 59.

    Returns (x/log x)(1 + 1/(2 log x)) and (x/log x)(1 + 3/(2 log x)).
    These are the only floating-point values in the package; all counting is
    exact integer arithmetic.
    """
    if x < 59:
        raise ValueError(f"bounds require x >= 59, got {x}")
    lx = log(x)
    base = x / lx
    return base * (1 + 1 / (2 * lx)), base * (1 + 3 / (2 * lx))


def save_prime_cache(table: PrimeTable, path) -> None:
    """Binary cache: version byte, then little-endian u64 limit, count, primes."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<B", _CACHE_VERSION))
        fh.write(struct.pack("<QQ", table.limit, len(table.primes)))
        fh.write(table.primes.astype("<u8").tobytes())


def load_prime_cache(path, limit: int | None = None,
                     spf_limit: int | None = None) -> PrimeTable:
    """Rebuild a PrimeTable from a cache file.

    If ``limit`` is given and smaller than the cached limit, the prime list is
    truncated; a cached limit below the requested one is an error.
    """
    with open(path, "rb") as fh:
        (version,) = struct.unpack("<B", fh.read(1))
        if version != _CACHE_VERSION:
            raise ValueError(f"unsupported cache version {version}")
        cached_limit, count = struct.unpack("<QQ", fh.read(16))
        primes = np.frombuffer(fh.read(8 * count), dtype="<u8").astype(np.int64)
    if limit is None:
        limit = cached_limit
    if limit > cached_limit:
        raise OutOfRangeError(f"cache covers {cached_limit} < requested {limit}")
    if limit < cached_limit:
        primes = primes[: int(np.searchsorted(primes, limit, side="right"))]
    return PrimeTable(int(limit), spf_limit=spf_limit, _primes=primes)
