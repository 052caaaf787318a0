"""Central values and derivatives of quadratically twisted L-series.

The twisting character is the Kronecker symbol of the even fundamental
discriminant 8d with d odd and squarefree.  All evaluation is through
truncated kernel-weighted Dirichlet sums:

    L(1/2)  = (1 + omega) sum_m lam(m) chi(m) m^(-1/2) w1(m / scale)
    L'(1/2) = (1 - omega) sum_n lam(n) chi(n) n^(-1/2) w2(n / scale)

with scale = 8|d| sqrt(level) and omega the root number of the twisted
form.  The derivative identity is used only on twists where omega = -1;
elsewhere it computes the derivative of the completed L-series, not of
L itself, so the evaluator refuses rather than return a misleading 0.

Two independent oracles live alongside: a balance-parameter variant of
the central-value identity (value must be invariant in the balance
parameter), and a general-s two-term identity whose central difference
checks the derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import loggamma

from .arith import SieveTables, default_sieve, kronecker
from .errors import DomainError, RamifiedTwistError, WrongSignError
from .forms import CoefficientTable, Newform
from .kernels import KernelSuite, gammainc_upper_reg

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TwistCharacter:
    """Quadratic character attached to the discriminant 8d, d odd squarefree."""

    d: int

    def __post_init__(self) -> None:
        if self.d == 0 or self.d % 2 == 0:
            raise DomainError(f"twist parameter must be odd and nonzero: {self.d}")

    @property
    def discriminant(self) -> int:
        return 8 * self.d

    @property
    def sign_at_minus_one(self) -> int:
        return 1 if self.d > 0 else -1

    def __call__(self, n: int) -> int:
        return kronecker(self.discriminant, n)


def make_twist(d: int, sieve: SieveTables | None = None) -> TwistCharacter:
    """Validated constructor: rejects even, zero, or non-squarefree d."""
    chi = TwistCharacter(d)
    sieve = sieve or default_sieve(abs(d) + 1)
    if abs(d) <= sieve.limit:
        squarefree = bool(sieve.is_squarefree[abs(d)])
    else:
        squarefree = all(e == 1 for _, e in sieve.factorize(abs(d)))
    if not squarefree:
        raise DomainError(f"twist parameter must be squarefree: {d}")
    return chi


_chi_cache: dict[int, np.ndarray] = {}
_CHI_CACHE_MAX_LEN = 1 << 17


def chi_vector(chi: TwistCharacter, m: int, sieve: SieveTables | None = None) -> np.ndarray:
    """chi(0..m) as an int8 array.

    Built multiplicatively: one Kronecker evaluation per prime, then one
    sign-flip slice per prime power and one zeroing slice per dividing
    prime.  Short vectors are cached per twist since tests and oracles
    revisit the same d repeatedly; long vectors (moment runs) are not.
    """
    cached = _chi_cache.get(chi.d)
    if cached is not None and len(cached) >= m + 1:
        return cached[: m + 1]
    sieve = sieve or default_sieve(m)
    if sieve.limit < m:
        raise DomainError(f"sieve limit {sieve.limit} below requested length {m}")
    disc = chi.discriminant
    out = np.ones(m + 1, dtype=np.int8)
    out[0] = 0
    for p in sieve.primes:
        p = int(p)
        if p > m:
            break
        c = kronecker(disc, p)
        if c == 1:
            continue
        if c == 0:
            out[p::p] = 0
            continue
        pk = p
        while pk <= m:
            out[pk::pk] *= -1
            pk *= p
    if m + 1 <= _CHI_CACHE_MAX_LEN:
        if len(_chi_cache) > 64:
            _chi_cache.clear()
        _chi_cache[chi.d] = out
    return out


@lru_cache(maxsize=8)
def suite_for(weight: int) -> KernelSuite:
    return KernelSuite(weight=weight)


def omega(form: Newform, chi: TwistCharacter) -> int:
    """Root number of the twisted form: i^kappa eta chi(-level).

    kappa is even so i^kappa is +-1; chi(-level) splits as chi(-1) times
    chi(level).  A twist sharing a factor with the level is ramified and
    has no place in this family.
    """
    if form.fricke is None:
        raise DomainError(f"form {form.label} has no detected involution sign")
    chi_q = kronecker(chi.discriminant, form.level)
    if chi_q == 0:
        raise RamifiedTwistError(
            f"gcd(8*{chi.d}, {form.level}) > 1: twist is ramified"
        )
    i_k = -1 if form.weight % 4 else 1
    return i_k * form.fricke * chi.sign_at_minus_one * chi_q


@dataclass(frozen=True)
class CentralValue:
    value: float
    omega: int
    truncation: int
    tail_estimate: float
    method: str  # "afe" | "balanced-afe" | "general-s-oracle"


def _natural_scale(form: Newform, chi: TwistCharacter) -> float:
    return 8.0 * abs(chi.d) * math.sqrt(form.level)


def kernel_sum_w1(
    table: CoefficientTable,
    chi_vec: np.ndarray,
    suite: KernelSuite,
    m: int,
    scale: float,
) -> float:
    """sum_{n<=m} lam(n) chi(n) n^(-1/2) w1(n/scale), fully vectorized."""
    n = np.arange(1, m + 1, dtype=np.float64)
    w = suite.w1(n / scale)
    return float(np.dot(table.values[1 : m + 1] * chi_vec[1 : m + 1], w / np.sqrt(n)))


def kernel_sum_w2(
    table: CoefficientTable,
    chi_vec: np.ndarray,
    suite: KernelSuite,
    m: int,
    scale: float,
) -> float:
    """sum_{n<=m} lam(n) chi(n) n^(-1/2) w2(n/scale)."""
    n = np.arange(1, m + 1, dtype=np.float64)
    w = suite.w2(n / scale)
    return float(np.dot(table.values[1 : m + 1] * chi_vec[1 : m + 1], w / np.sqrt(n)))


def _prepare(
    table: CoefficientTable, chi: TwistCharacter, sieve: SieveTables | None
) -> tuple[Newform, KernelSuite, float]:
    form = table.form
    if math.gcd(abs(chi.d), form.level) != 1:
        raise RamifiedTwistError(
            f"twist d={chi.d} shares a factor with level {form.level}"
        )
    return form, suite_for(form.weight), _natural_scale(form, chi)


def central_value(
    table: CoefficientTable,
    chi: TwistCharacter,
    tol: float = 1e-8,
    sieve: SieveTables | None = None,
) -> CentralValue:
    """L(1/2) for the twisted form, truncated with a certified tail.

    A twist with omega = -1 forces the value to zero through the
    (1 + omega) prefactor; that case short-circuits without summing.
    """
    form, suite, scale = _prepare(table, chi, sieve)
    w = omega(form, chi)
    if w == -1:
        return CentralValue(0.0, w, 0, 0.0, "afe")
    m = suite.truncation_length(scale, tol / 2.0)
    table.require_length(m)
    vec = chi_vector(chi, m, sieve)
    s = kernel_sum_w1(table, vec, suite, m, scale)
    return CentralValue(2.0 * s, w, m, 2.0 * suite.tail_bound(m, scale), "afe")


def central_value_balanced(
    table: CoefficientTable,
    chi: TwistCharacter,
    balance: float = 1.0,
    tol: float = 1e-8,
    sieve: SieveTables | None = None,
) -> CentralValue:
    """L(1/2) via the two-term identity with a free balance parameter.

    The two kernel sums run at scales (natural/balance) and
    (natural*balance); their omega-weighted sum is provably independent
    of the balance, which is the property tests pin down.  At balance 1
    this reduces to (1 + omega) times the single sum.  For omega = -1 the
    value is a genuine numerical cancellation, not a prefactor zero.
    """
    if balance <= 0:
        raise DomainError(f"balance parameter must be positive: {balance}")
    form, suite, scale = _prepare(table, chi, sieve)
    w = omega(form, chi)
    scale_near = scale / balance
    scale_far = scale * balance
    m_near = suite.truncation_length(scale_near, tol / 2.0)
    m_far = suite.truncation_length(scale_far, tol / 2.0)
    m = max(m_near, m_far)
    table.require_length(m)
    vec = chi_vector(chi, m, sieve)
    s_near = kernel_sum_w1(table, vec, suite, m_near, scale_near)
    s_far = kernel_sum_w1(table, vec, suite, m_far, scale_far)
    tail = suite.tail_bound(m_near, scale_near) + suite.tail_bound(m_far, scale_far)
    return CentralValue(s_near + w * s_far, w, m, tail, "balanced-afe")


def balanced_gross_mass(
    table: CoefficientTable,
    chi: TwistCharacter,
    balance: float = 1.0,
    tol: float = 1e-8,
    sieve: SieveTables | None = None,
) -> float:
    """sum of |term| over both balanced sums: the yardstick for vanishing."""
    _, suite, scale = _prepare(table, chi, sieve)
    total = 0.0
    for sc in (scale / balance, scale * balance):
        m = suite.truncation_length(sc, tol / 2.0)
        table.require_length(m)
        vec = chi_vector(chi, m, sieve)
        n = np.arange(1, m + 1, dtype=np.float64)
        w = suite.w1(n / sc)
        total += float(
            np.dot(np.abs(table.values[1 : m + 1] * vec[1 : m + 1]), w / np.sqrt(n))
        )
    return total


def central_derivative(
    table: CoefficientTable,
    chi: TwistCharacter,
    tol: float = 1e-8,
    sieve: SieveTables | None = None,
) -> CentralValue:
    """L'(1/2) for a twist with omega = -1.

    The identity L' = (1 - omega) * sum ... w2(...) is only the central
    derivative when omega = -1 (otherwise it differentiates the completed
    series).  omega = +1 input is a contract violation, not a zero.
    """
    form, suite, scale = _prepare(table, chi, sieve)
    w = omega(form, chi)
    if w != -1:
        raise WrongSignError(
            f"derivative identity needs root number -1; twist d={chi.d} of "
            f"{form.label} has +1"
        )
    m = suite.truncation_length(scale, tol / 2.0)
    table.require_length(m)
    vec = chi_vector(chi, m, sieve)
    s = kernel_sum_w2(table, vec, suite, m, scale)
    return CentralValue(2.0 * s, w, m, 2.0 * suite.tail_bound(m, scale), "afe")


def afe_general_s(
    table: CoefficientTable,
    chi: TwistCharacter,
    s: complex,
    tol: float = 1e-8,
    sieve: SieveTables | None = None,
) -> complex:
    """L(s) near the center via the two-term incomplete-gamma identity.

    With b_s = s + (kappa-1)/2 and P = scale / 2 pi:

      L(s) = sum lam chi(m) m^(-s) Q(b_s, m/P)
           + omega P^(1-2s) [Gamma(b_{1-s})/Gamma(b_s)]
             sum lam chi(m) m^(s-1) Q(b_{1-s}, m/P)

    Serves as the derivative oracle through central differencing; the
    1e-3 truncation-margin factor absorbs the m^(Re s - 1/2) drift of
    the coefficients away from the center.
    """
    s = complex(s)
    if abs(s - 0.5) > 0.1:
        raise DomainError(f"general-s evaluation restricted to |s-1/2| <= 0.1: {s}")
    form, suite, scale = _prepare(table, chi, sieve)
    w = omega(form, chi)
    kappa = form.weight
    b_s = s + (kappa - 1) / 2.0
    b_r = (1.0 - s) + (kappa - 1) / 2.0
    m = suite.truncation_length(scale, tol * 1e-3)
    table.require_length(m)
    vec = chi_vector(chi, m, sieve)
    n = np.arange(1, m + 1, dtype=np.float64)
    coeff = table.values[1 : m + 1] * vec[1 : m + 1]
    x = _TWO_PI * n / scale

    if s.imag == 0.0:
        direct = complex(np.dot(coeff * n ** (-s.real), gammainc_upper_reg(b_s.real, x)))
        mirror = complex(np.dot(coeff * n ** (s.real - 1.0), gammainc_upper_reg(b_r.real, x)))
    else:
        direct = complex(np.dot(coeff * np.exp(-s * np.log(n)), gammainc_upper_reg(b_s, x)))
        mirror = complex(np.dot(coeff * np.exp((s - 1.0) * np.log(n)), gammainc_upper_reg(b_r, x)))
    log_p = math.log(scale / _TWO_PI)
    ratio = np.exp((1.0 - 2.0 * s) * log_p + loggamma(b_r) - loggamma(b_s))
    return direct + w * complex(ratio) * mirror


def derivative_fd_oracle(
    table: CoefficientTable,
    chi: TwistCharacter,
    h: float = 1e-3,
    tol: float = 1e-8,
    sieve: SieveTables | None = None,
) -> float:
    """Central difference of the general-s identity at the center."""
    up = afe_general_s(table, chi, 0.5 + h, tol, sieve)
    down = afe_general_s(table, chi, 0.5 - h, tol, sieve)
    return (up.real - down.real) / (2.0 * h)
