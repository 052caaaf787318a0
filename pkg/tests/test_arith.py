"""Kronecker symbol, sieve tables, totient, divisor counts."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistmoment.arith import (
    SIEVE_LIMIT_CAP,
    build_sieve,
    default_sieve,
    divisor_counts,
    euler_phi,
    kronecker,
)
from twistmoment.errors import CapacityError, FactorLimitError


def _jacobi_reference(a: int, n: int) -> int:
    # textbook recursion, odd n > 0 only
    assert n > 0 and n % 2 == 1
    a %= n
    r = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                r = -r
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            r = -r
        a %= n
    return r if n == 1 else 0


def test_kronecker_small_table():
    # (a|n) over a familiar block, checked against the reference recursion
    for n in range(1, 60, 2):
        for a in range(-30, 31):
            assert kronecker(a, n) == _jacobi_reference(a, n)


def test_kronecker_at_two_follows_mod_eight():
    for a in range(-40, 41):
        want = 0 if a % 2 == 0 else (1 if a % 8 in (1, 7) else -1)
        assert kronecker(a, 2) == want


def test_kronecker_negative_modulus():
    # (a|-n) = sign(a) * (a|n) up to the (a|-1) convention
    for a in (-7, -3, -1, 1, 3, 7, 10):
        for n in (3, 5, 9, 15):
            sign = -1 if a < 0 else 1
            assert kronecker(a, -n) == sign * kronecker(a, n)


def test_kronecker_zero_cases():
    assert kronecker(1, 0) == 1
    assert kronecker(-1, 0) == 1
    assert kronecker(5, 0) == 0
    assert kronecker(0, 7) == 0
    assert kronecker(0, 1) == 1


@settings(max_examples=300, deadline=None)
@given(
    a=st.integers(min_value=-(10**9), max_value=10**9),
    b=st.integers(min_value=-(10**9), max_value=10**9),
    n=st.integers(min_value=1, max_value=10**6).map(lambda k: 2 * k + 1),
)
def test_kronecker_multiplicative_in_top(a, b, n):
    assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


@settings(max_examples=300, deadline=None)
@given(
    a=st.integers(min_value=-(10**6), max_value=10**6),
    m=st.integers(min_value=1, max_value=10**4).map(lambda k: 2 * k + 1),
    n=st.integers(min_value=1, max_value=10**4).map(lambda k: 2 * k + 1),
)
def test_kronecker_multiplicative_in_bottom(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


@settings(max_examples=200, deadline=None)
@given(
    a=st.integers(min_value=0, max_value=10**6),
    n=st.integers(min_value=1, max_value=10**4).map(lambda k: 2 * k + 1),
)
def test_kronecker_periodic_mod_n(a, n):
    assert kronecker(a, n) == kronecker(a + n, n)


def test_sieve_factorize_roundtrip(sieve):
    rng = np.random.default_rng(7)
    for n in rng.integers(2, sieve.limit, size=200):
        n = int(n)
        facs = sieve.factorize(n)
        prod = 1
        for p, e in facs:
            assert p >= 2
            assert all(p % q != 0 for q in range(2, min(p, 100)) if q * q <= p) or p < 4
            prod *= p**e
        assert prod == n


def test_sieve_primes_start_correctly():
    s = build_sieve(100)
    assert list(s.primes[:10]) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert s.primes[0] == 2  # index 0 and 1 must not leak in


def test_sieve_moebius_matches_definition():
    s = build_sieve(2000)
    for n in range(1, 2000):
        facs = s.factorize(n) if n > 1 else []
        if any(e > 1 for _, e in facs):
            want = 0
        else:
            want = -1 if len(facs) % 2 else 1
        assert s.moebius[n] == want
        assert bool(s.is_squarefree[n]) == (want != 0)


def test_sieve_limit_cap_enforced():
    with pytest.raises(CapacityError):
        build_sieve(SIEVE_LIMIT_CAP + 1)


def test_factorize_rejects_out_of_range():
    s = build_sieve(100)
    with pytest.raises(FactorLimitError):
        s.factorize(101)
    with pytest.raises(ValueError):
        s.factorize(0)


def test_default_sieve_grows_monotonically():
    s1 = default_sieve(1 << 10)
    s2 = default_sieve(s1.limit + 1)
    assert s2.limit >= s1.limit + 1
    # growing never shrinks the shared instance
    s3 = default_sieve(16)
    assert s3.limit >= s2.limit


def test_euler_phi_agrees_with_direct_count(sieve):
    for n in (1, 2, 12, 36, 97, 360, 1024, 3465):
        direct = sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
        assert euler_phi(n, sieve) == direct


def test_divisor_counts_small():
    d = divisor_counts(30)
    assert d[0] == 0
    assert d[1] == 1
    assert d[12] == 6
    assert d[28] == 6
    assert d[29] == 2
    for n in range(1, 31):
        assert d[n] == sum(1 for k in range(1, n + 1) if n % k == 0)
