"""The two-form Euler product at the origin and the moment constant.

E(Q') below is the product over odd primes of local factors built from
the normalized coefficients of two distinct forms; Q' ranges over the
four divisors {1, q1, q2, q1q2} built from the two levels, entering only
through the parity of p-adic valuations.  The moment constant is the
signed combination

    C = (1/2 pi^2) [E(1) + s1 E(q1) - s2 E(q2) - s1 s2 E(q1 q2)]

with s1 = i^k1 eta_f and s2 = i^k2 eta_g.  A factorization identity
(E(1) E(q1 q2) = E(q1) E(q2), exact term by term) lets the same constant
be assembled as (1/2 pi^2) E(1) (1 + s1 r1)(1 - s2 r2), which exposes
the only two ways C can vanish.

Everything here is a raw truncated product: no tail extrapolation, the
P/2-versus-P stabilization delta is reported instead.  Local factors
must stay finite and nonzero; a degenerate factor raises instead of
silently skewing the product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import SieveTables, default_sieve
from .errors import DegenerateFactorError, DomainError
from .forms import CoefficientTable

_INV_TWO_PI_SQ = 1.0 / (2.0 * math.pi**2)


def _check_distinct(table_f: CoefficientTable, table_g: CoefficientTable) -> None:
    if table_f.form.label == table_g.form.label:
        raise DomainError(
            "the two forms must be distinct: the shared-form product has a "
            "pole at the origin"
        )


def _nu(p: int, n: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def euler_local_factor(
    p: int,
    table_f: CoefficientTable,
    table_g: CoefficientTable,
    qprime: int,
) -> float:
    """One local factor of E(Q') at the origin, for an odd prime p.

    Away from the levels:  1 + p/(p+1) (half-sum over the two character
    signs of inverted quadratic denominators, minus one).  At a prime
    dividing a level, the principal character kills that form's 1/p term
    and the sign (-1)^{nu_p(Q')} weights the plus branch.
    """
    if p == 2 or p < 2:
        raise DomainError(f"local factors are defined for odd primes, got {p}")
    lf = float(table_f.values[p])
    lg = float(table_g.values[p])
    q1 = table_f.form.level
    q2 = table_g.form.level
    rp = 1.0 / math.sqrt(p)
    pp = 1.0 / p

    if q1 % p and q2 % p:
        minus = (1.0 - lf * rp + pp) * (1.0 - lg * rp + pp)
        plus = (1.0 + lf * rp + pp) * (1.0 + lg * rp + pp)
        if abs(minus) < 1e-12 or abs(plus) < 1e-12:
            raise DegenerateFactorError(f"inverted quantity vanishes at p={p}")
        return 1.0 + (p / (p + 1.0)) * (0.5 / minus + 0.5 / plus - 1.0)

    ef = 0.0 if q1 % p == 0 else pp
    eg = 0.0 if q2 % p == 0 else pp
    minus = (1.0 - lf * rp + ef) * (1.0 - lg * rp + eg)
    plus = (1.0 + lf * rp + ef) * (1.0 + lg * rp + eg)
    if abs(minus) < 1e-12 or abs(plus) < 1e-12:
        raise DegenerateFactorError(f"inverted quantity vanishes at p={p}")
    sign = -1.0 if _nu(p, qprime) % 2 else 1.0
    return (p / (p + 1.0)) * (0.5 / minus + sign * 0.5 / plus)


@dataclass(frozen=True)
class EulerTruncation:
    """A truncated product with its own half-cutoff comparison value."""

    value: float
    half_value: float
    prime_cutoff: int

    @property
    def delta(self) -> float:
        return abs(self.value - self.half_value)


def E_at_origin(
    table_f: CoefficientTable,
    table_g: CoefficientTable,
    qprime: int,
    prime_cutoff: int,
    sieve: SieveTables | None = None,
) -> EulerTruncation:
    """prod_{odd p <= P} of local factors, with the P/2 partial retained.

    Good primes are evaluated in one vectorized sweep; level primes go
    through the scalar branch.  Good-prime factors are bounded below by
    1/(p+1) and even-exponent level factors are sums of positive halves,
    so those stay positive; an odd-exponent level factor is a signed
    half-difference and may legitimately be negative when the two
    eigenvalues pull the same way (e.g. the level prime of 37a against
    delta).  Only a vanishing or non-finite factor is an error.
    """
    _check_distinct(table_f, table_g)
    if prime_cutoff < 3:
        raise DomainError("prime cutoff must be at least 3")
    sieve = sieve or default_sieve(prime_cutoff)
    table_f.require_length(prime_cutoff)
    table_g.require_length(prime_cutoff)
    primes = sieve.primes
    primes = primes[(primes <= prime_cutoff) & (primes > 2)]
    q1 = table_f.form.level
    q2 = table_g.form.level

    qq = q1 * q2
    good = np.array([qq % int(p) != 0 for p in primes])
    factors = np.empty(len(primes))

    pg = primes[good].astype(np.float64)
    lf = table_f.values[primes[good]]
    lg = table_g.values[primes[good]]
    rp = 1.0 / np.sqrt(pg)
    pp = 1.0 / pg
    minus = (1.0 - lf * rp + pp) * (1.0 - lg * rp + pp)
    plus = (1.0 + lf * rp + pp) * (1.0 + lg * rp + pp)
    if np.any(np.abs(minus) < 1e-12) or np.any(np.abs(plus) < 1e-12):
        p_bad = int(pg[np.argmin(np.minimum(np.abs(minus), np.abs(plus)))])
        raise DegenerateFactorError(f"inverted quantity vanishes at p={p_bad}")
    factors[good] = 1.0 + (pg / (pg + 1.0)) * (0.5 / minus + 0.5 / plus - 1.0)
    for i in np.flatnonzero(~good):
        factors[i] = euler_local_factor(int(primes[i]), table_f, table_g, qprime)

    degenerate = ~np.isfinite(factors) | (np.abs(factors) < 1e-12)
    if np.any(degenerate):
        p_bad = int(primes[np.flatnonzero(degenerate)[0]])
        raise DegenerateFactorError(
            f"local factor at p={p_bad} vanishes or is not finite"
        )
    half = primes <= prime_cutoff // 2
    return EulerTruncation(
        value=float(np.prod(factors)),
        half_value=float(np.prod(factors[half])),
        prime_cutoff=prime_cutoff,
    )


@dataclass(frozen=True)
class EulerConstantReport:
    prime_cutoff: int
    E_values: dict[int, float]
    C_fg: float
    stabilization: float
    sign_pattern: tuple[int, int]
    C_fg_factored: float = 0.0
    factorization_residual: float = 0.0
    E_deltas: dict[int, float] = field(default_factory=dict)
    predicted_vanishing: bool = False
    labels: tuple[str, str] = ("", "")

    def as_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "prime_cutoff": self.prime_cutoff,
            "E_values": {str(k): v for k, v in self.E_values.items()},
            "E_deltas": {str(k): v for k, v in self.E_deltas.items()},
            "C_fg": self.C_fg,
            "C_fg_factored": self.C_fg_factored,
            "factorization_residual": self.factorization_residual,
            "stabilization": self.stabilization,
            "sign_pattern": list(self.sign_pattern),
            "predicted_vanishing": self.predicted_vanishing,
        }


def _is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


def sign_factor(table: CoefficientTable) -> int:
    """i^kappa times the involution eigenvalue; kappa even keeps it real."""
    form = table.form
    if form.fricke is None:
        raise DomainError(f"form {form.label} has no detected involution sign")
    return (-1 if form.weight % 4 else 1) * form.fricke


def constant_Cfg(
    table_f: CoefficientTable,
    table_g: CoefficientTable,
    prime_cutoff: int,
    sieve: SieveTables | None = None,
) -> EulerConstantReport:
    """The moment constant, assembled twice and cross-checked.

    Direct route: signed four-term combination of E values.  Factored
    route: E(1)(1 + s1 r1)(1 - s2 r2) using the multiplicative structure.
    Their agreement is the factorization identity; the report carries the
    residual rather than asserting it here.
    """
    _check_distinct(table_f, table_g)
    sieve = sieve or default_sieve(prime_cutoff)
    q1 = table_f.form.level
    q2 = table_g.form.level
    roles = (1, q1, q2, q1 * q2)
    trunc = {qp: E_at_origin(table_f, table_g, qp, prime_cutoff, sieve) for qp in set(roles)}
    e1, eq1, eq2, eq12 = (trunc[qp].value for qp in roles)
    h1, hq1, hq2, hq12 = (trunc[qp].half_value for qp in roles)
    s1 = sign_factor(table_f)
    s2 = sign_factor(table_g)

    c = _INV_TWO_PI_SQ * (e1 + s1 * eq1 - s2 * eq2 - s1 * s2 * eq12)
    c_half = _INV_TWO_PI_SQ * (h1 + s1 * hq1 - s2 * hq2 - s1 * s2 * hq12)
    c_factored = _INV_TWO_PI_SQ * e1 * (1.0 + s1 * eq1 / e1) * (1.0 - s2 * eq2 / e1)
    residual = abs(e1 * eq12 - eq1 * eq2) / max(abs(e1 * eq12), 1e-300)

    vanish = (s1 == -1 and _is_square(q1)) or (s2 == 1 and _is_square(q2))
    return EulerConstantReport(
        prime_cutoff=prime_cutoff,
        E_values={qp: trunc[qp].value for qp in set(roles)},
        C_fg=c,
        stabilization=abs(c - c_half),
        sign_pattern=(s1, s2),
        C_fg_factored=c_factored,
        factorization_residual=residual,
        E_deltas={qp: trunc[qp].delta for qp in set(roles)},
        predicted_vanishing=vanish,
        labels=(table_f.form.label, table_g.form.label),
    )


# -- edge L-values and the bounded-ratio diagnostic -------------------------


def _rankin_local(lf: float, lg: float, good_f: bool, good_g: bool, x: float) -> float:
    """Reciprocal local factor of L(s, f x g) at x = p^-s, real closed form."""
    if good_f and good_g:
        return 1.0 - lf * lg * x + (lf * lf + lg * lg - 2.0) * x * x - lf * lg * x**3 + x**4
    if good_f and not good_g:
        return 1.0 - lf * lg * x + lg * lg * x * x
    if good_g and not good_f:
        return 1.0 - lf * lg * x + lf * lf * x * x
    return 1.0 - lf * lg * x


def _sym2_local(lam: float, good: bool, x: float) -> float:
    """Reciprocal local factor of L(s, Sym^2) at x = p^-s."""
    if good:
        return (1.0 - (lam * lam - 2.0) * x + x * x) * (1.0 - x)
    return 1.0 - lam * lam * x


@dataclass(frozen=True)
class EdgeLValues:
    rankin: EulerTruncation
    sym2_f: EulerTruncation
    sym2_g: EulerTruncation

    def as_dict(self) -> dict:
        return {
            "L1_rankin": self.rankin.value,
            "L1_rankin_delta": self.rankin.delta,
            "L1_sym2_f": self.sym2_f.value,
            "L1_sym2_f_delta": self.sym2_f.delta,
            "L1_sym2_g": self.sym2_g.value,
            "L1_sym2_g_delta": self.sym2_g.delta,
        }


def edge_L_values(
    table_f: CoefficientTable,
    table_g: CoefficientTable,
    prime_cutoff: int,
    sieve: SieveTables | None = None,
) -> EdgeLValues:
    """Truncated L(1, f x g), L(1, Sym^2 f), L(1, Sym^2 g).

    These run over every prime including 2 (the origin product is odd
    primes only; the difference lands in the bounded-ratio diagnostic).
    Bad primes take the one-dimensional convention with the form's own
    coefficient.
    """
    _check_distinct(table_f, table_g)
    sieve = sieve or default_sieve(prime_cutoff)
    table_f.require_length(prime_cutoff)
    table_g.require_length(prime_cutoff)
    primes = sieve.primes
    primes = primes[primes <= prime_cutoff]
    q1 = table_f.form.level
    q2 = table_g.form.level

    rk = np.empty(len(primes))
    s2f = np.empty(len(primes))
    s2g = np.empty(len(primes))
    for i, p in enumerate(primes):
        p = int(p)
        x = 1.0 / p
        lf = float(table_f.values[p])
        lg = float(table_g.values[p])
        gf = q1 % p != 0
        gg = q2 % p != 0
        rk[i] = _rankin_local(lf, lg, gf, gg, x)
        s2f[i] = _sym2_local(lf, gf, x)
        s2g[i] = _sym2_local(lg, gg, x)
    for name, arr in (("rankin", rk), ("sym2_f", s2f), ("sym2_g", s2g)):
        if np.any(np.abs(arr) < 1e-12) or not np.all(np.isfinite(arr)):
            p_bad = int(primes[np.flatnonzero((np.abs(arr) < 1e-12) | ~np.isfinite(arr))[0]])
            raise DegenerateFactorError(f"degenerate {name} factor at p={p_bad}")
    half = primes <= prime_cutoff // 2

    def pack(arr: np.ndarray) -> EulerTruncation:
        return EulerTruncation(
            value=float(np.prod(1.0 / arr)),
            half_value=float(np.prod(1.0 / arr[half])),
            prime_cutoff=prime_cutoff,
        )

    return EdgeLValues(rankin=pack(rk), sym2_f=pack(s2f), sym2_g=pack(s2g))


def bounded_ratio_diagnostic(
    table_f: CoefficientTable,
    table_g: CoefficientTable,
    qprime: int,
    prime_cutoff: int,
    sieve: SieveTables | None = None,
) -> float:
    """E(Q') divided by the three matched-truncation edge L-values.

    The quotient is the bounded Euler product the main-term analysis
    factors out; it must stay within a fixed band across truncations.
    """
    sieve = sieve or default_sieve(prime_cutoff)
    e = E_at_origin(table_f, table_g, qprime, prime_cutoff, sieve)
    edge = edge_L_values(table_f, table_g, prime_cutoff, sieve)
    denom = edge.rankin.value * edge.sym2_f.value * edge.sym2_g.value
    if denom == 0.0 or not math.isfinite(denom):
        raise DegenerateFactorError("edge L-value product degenerate")
    return e.value / denom
