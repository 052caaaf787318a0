"""Shared fixtures: one sieve and the three built-in coefficient tables.

Table construction dominates collection cost (point counting is O(p) per
prime), so everything heavy is session scoped and sized once for the
whole suite.  Individual tests that need longer tables grow them through
get_form, which reuses the process-wide cache.
"""

import pytest

from twistmoment.arith import default_sieve
from twistmoment.forms import get_form

SIEVE_LIMIT = 1 << 19
TABLE_LEN = 100_000


@pytest.fixture(scope="session")
def sieve():
    return default_sieve(SIEVE_LIMIT)


@pytest.fixture(scope="session")
def tdelta(sieve):
    return get_form("delta", TABLE_LEN, sieve)


@pytest.fixture(scope="session")
def t11a(sieve):
    return get_form("11a", TABLE_LEN, sieve)


@pytest.fixture(scope="session")
def t37a(sieve):
    return get_form("37a", TABLE_LEN, sieve)
