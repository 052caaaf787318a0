"""Elementary arithmetic kit: Kronecker symbol, factor sieve, totient.

Everything here is exact integer arithmetic.  The sieve tables are the
single factorization source for the rest of the package; any routine
that needs a factorization past the sieve limit fails loudly rather
than falling back to trial division.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, FactorLimitError

DEFAULT_SIEVE_LIMIT = 1 << 24
# Hard memory guard: int32 spf + int8 mu + bool squarefree ~ 6 bytes/entry.
SIEVE_LIMIT_CAP = 1 << 27


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), defined for all integers.

    Binary-GCD style loop: factors of two are stripped with the
    (a|2) = (2|a) supplement and odd parts swap through quadratic
    reciprocity, so the cost is O(log min(|a|, |n|)) word operations.
    """
    if n == 0:
        return 1 if a in (1, -1) else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    # (a|2^v): defined by a mod 8, vanishes for even a (caught above).
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v & 1 and a % 8 in (3, 5):
        result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass
class SieveTables:
    """Factorization tables up to ``limit`` (inclusive).

    smallest_prime_factor[n] is the least prime dividing n (0 for n < 2),
    moebius[n] the Moebius function, is_squarefree[n] = (moebius[n] != 0).
    """

    limit: int
    smallest_prime_factor: np.ndarray
    moebius: np.ndarray
    is_squarefree: np.ndarray
    _primes: np.ndarray | None = field(default=None, repr=False)

    @property
    def primes(self) -> np.ndarray:
        if self._primes is None:
            idx = np.arange(self.limit + 1, dtype=np.int64)
            hit = (self.smallest_prime_factor == idx) & (idx >= 2)
            self._primes = np.flatnonzero(hit)
        return self._primes

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization of n >= 1 as (prime, exponent) pairs."""
        if n < 1:
            raise ValueError(f"cannot factor {n}; need n >= 1")
        if n > self.limit:
            raise FactorLimitError(
                f"{n} exceeds sieve limit {self.limit}; rebuild with a larger limit"
            )
        spf = self.smallest_prime_factor
        out: list[tuple[int, int]] = []
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out


def build_sieve(limit: int = DEFAULT_SIEVE_LIMIT) -> SieveTables:
    """Build factorization tables for 0..limit."""
    if limit < 2:
        raise ValueError("sieve limit must be at least 2")
    if limit > SIEVE_LIMIT_CAP:
        raise CapacityError(
            f"sieve limit {limit} exceeds configured cap {SIEVE_LIMIT_CAP}"
        )
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, int(limit**0.5) + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    idx = np.arange(limit + 1, dtype=np.int32)
    rest = (spf == 0) & (idx >= 2)
    spf[rest] = idx[rest]

    primes = np.flatnonzero((spf == idx) & (idx >= 2))
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes:
        p = int(p)
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p :: p * p] = 0
    return SieveTables(
        limit=limit,
        smallest_prime_factor=spf,
        moebius=mu,
        is_squarefree=mu != 0,
    )


_default_sieve: SieveTables | None = None


def default_sieve(minimum: int = 1 << 20) -> SieveTables:
    """Process-wide sieve, grown on demand (never past the cap)."""
    global _default_sieve
    if _default_sieve is None or _default_sieve.limit < minimum:
        # Round up to a power of two so repeated growth is O(log) rebuilds.
        target = 1 << max(20, int(minimum - 1).bit_length())
        _default_sieve = build_sieve(target)
    return _default_sieve


def euler_phi(n: int, sieve: SieveTables) -> int:
    """Euler totient via the sieve factorization."""
    result = n
    for p, _ in sieve.factorize(n):
        result -= result // p
    return result


def divisor_counts(limit: int) -> np.ndarray:
    """d(n) for n = 0..limit (d[0] = 0), by the harmonic slice sweep."""
    d = np.zeros(limit + 1, dtype=np.int32)
    for i in range(1, limit + 1):
        d[i::i] += 1
    return d
