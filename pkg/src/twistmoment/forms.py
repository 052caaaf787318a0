"""Holomorphic newforms and their normalized Hecke coefficient tables.

Two coefficient sources are implemented:

* the weight-12 level-1 form, expanded exactly as q * prod(1-q^k)^24
  with arbitrary-precision integers (Jacobi's identity gives the cube of
  the product as a sparse theta series, so three big squarings suffice);
* rational elliptic curves, where a_p comes from counting points over
  F_p with a quadratic-character sum over the completed-square cubic.

Both feed the same normalization lambda(n) = a(n) / n^((k-1)/2), and the
Hecke recurrence extends prime data to all indices.  The Fricke sign is
not read from a table: it is detected numerically from the theta-series
involution identity F(1/t) = eta * i^k * t^k * F(t) and cross-checked at
a second scaling point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import gmpy2
import numpy as np

from .arith import SieveTables, divisor_counts
from .errors import (
    CapacityError,
    DomainError,
    IndeterminateSignError,
    SignInconsistencyError,
    TableTooShortError,
    VerificationError,
)

_SQRT3 = math.sqrt(3.0)

# Beyond this the packed-integer expansion would need > ~0.5 GB; the slot
# width itself adapts to M, so this is a memory cap, not an overflow one.
DELTA_LENGTH_CAP = 1 << 21


@dataclass(frozen=True)
class Newform:
    """A holomorphic newform of even weight and odd level.

    kind is "eta24-delta" or "elliptic-curve"; curve_coeffs holds the
    integral Weierstrass coefficients (a1, a2, a3, a4, a6) when the kind
    is elliptic.  fricke is None until detected numerically.
    """

    label: str
    weight: int
    level: int
    kind: str
    curve_coeffs: tuple[int, int, int, int, int] | None = None
    fricke: int | None = None

    def __post_init__(self) -> None:
        if self.weight < 2 or self.weight % 2:
            raise DomainError(f"weight must be even and positive: {self.weight}")
        if self.level < 1 or self.level % 2 == 0:
            raise DomainError(f"level must be odd and positive: {self.level}")
        if self.kind == "elliptic-curve":
            if self.curve_coeffs is None or len(self.curve_coeffs) != 5:
                raise DomainError("elliptic-curve forms need (a1,a2,a3,a4,a6)")
            if self.weight != 2:
                raise DomainError("elliptic-curve forms have weight 2")
        elif self.kind == "eta24-delta":
            if (self.weight, self.level) != (12, 1):
                raise DomainError("eta24-delta is the weight-12 level-1 form")
        elif self.kind != "coefficient-file":
            raise DomainError(f"unknown form kind: {self.kind}")


@dataclass
class CoefficientTable:
    """Normalized coefficients lambda(1..M); values[0] is unused padding."""

    form: Newform
    values: np.ndarray

    @property
    def length(self) -> int:
        return len(self.values) - 1

    def require_length(self, m: int) -> None:
        if self.length < m:
            raise TableTooShortError(
                f"table for {self.form.label} has length {self.length}, need {m}"
            )


# -- exact expansion of the weight-12 form -------------------------------


def delta_tau(m: int) -> list[int]:
    """Exact tau values from q * prod(1 - q^k)^24, indexed so out[n] = tau(n).

    out[0] is unused padding; the usable range is 1 <= n <= m.

    Jacobi: prod(1-q^k)^3 = sum_{j>=0} (-1)^j (2j+1) q^{j(j+1)/2}, so the
    24th power is the 8th power of a sparse series.  Series are packed
    into single big integers with a fixed slot width and multiplied with
    gmpy2, which turns the expansion into three squarings.  The slot
    width grows with m (|tau(n)| <= sqrt(3) n^6), so no overflow is
    possible below the length cap.
    """
    if m < 1:
        raise DomainError("need m >= 1")
    if m > DELTA_LENGTH_CAP:
        raise CapacityError(
            f"expansion length {m} exceeds cap {DELTA_LENGTH_CAP}"
        )
    nslots = m + 1
    bits = 6 * math.log2(nslots + 1) + math.log2(_SQRT3) + 10
    b = 8 * int(math.ceil(bits / 8.0))
    w = b // 8
    half = 1 << (b - 1)

    # Offset-encoded packing of the sparse cube series.
    buf = bytearray(half.to_bytes(w, "little") * nslots)
    j = 0
    while j * (j + 1) // 2 <= m:
        e = j * (j + 1) // 2
        c = (2 * j + 1) * (-1 if j & 1 else 1)
        buf[e * w : (e + 1) * w] = (half + c).to_bytes(w, "little")
        j += 1
    offset = (gmpy2.mpz(half) * ((gmpy2.mpz(1) << (b * nslots)) - 1)) // ((gmpy2.mpz(1) << b) - 1)
    cube = gmpy2.mpz(int.from_bytes(bytes(buf), "little")) - offset

    mod = gmpy2.mpz(1) << (b * nslots)
    p2 = (cube * cube) % mod
    p4 = (p2 * p2) % mod
    p8 = (p4 * p4) % mod

    raw = int(p8 + offset).to_bytes(w * nslots + 16, "little")
    # Slot i holds the q^i coefficient of prod(1-q^k)^24, which is
    # tau(i+1) after multiplying back the leading q; align to tau(n).
    out = [0]
    for i in range(m):
        out.append(int.from_bytes(raw[i * w : (i + 1) * w], "little") - half)
    return out


def delta_coefficients(m: int) -> np.ndarray:
    """Normalized lambda(n) = tau(n) / n^(11/2) for n <= m (index 0 unused)."""
    tau = delta_tau(m)
    lam = np.zeros(m + 1)
    n = np.arange(1, m + 1, dtype=np.float64)
    lam[1:] = np.array([float(t) for t in tau[1:]]) / n**5.5
    return lam


# -- elliptic curve point counts ------------------------------------------


def elliptic_ap(curve: tuple[int, int, int, int, int], p: int) -> int:
    """Trace of Frobenius a_p = p + 1 - #E(F_p) by direct point counting.

    Odd p: complete the square and sum the quadratic character of the
    resulting cubic (the count includes a singular point at bad p, which
    yields the standard a_p in {0, 1, -1} for the minimal model).  p = 2
    falls back to enumerating the four affine pairs.
    """
    a1, a2, a3, a4, a6 = curve
    if p == 2:
        count = 1  # point at infinity
        for x in range(2):
            for y in range(2):
                lhs = (y * y + a1 * x * y + a3 * y) % 2
                rhs = (x**3 + a2 * x * x + a4 * x + a6) % 2
                if lhs == rhs:
                    count += 1
        return p + 1 - count
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    x = np.arange(p, dtype=np.int64)
    qr = np.zeros(p, dtype=np.int8)
    h = x[: p // 2 + 1]
    qr[(h * h) % p] = 1
    v = ((4 * x + b2 % p) * x + (2 * b4) % p) % p
    v = (v * x + b6 % p) % p
    chi = 2 * qr[v].astype(np.int64) - 1
    chi[v == 0] = 0
    return -int(chi.sum())


def hecke_extend(
    form: Newform, prime_values: dict[int, float], m: int, sieve: SieveTables
) -> np.ndarray:
    """Extend normalized prime coefficients to all n <= m.

    Recurrence lambda(p^(e+1)) = lambda(p) lambda(p^e) - chi0(p) lambda(p^(e-1))
    with chi0 the trivial character mod the level, plus multiplicativity
    across coprime parts.
    """
    if sieve.limit < m:
        raise TableTooShortError(f"sieve limit {sieve.limit} below table length {m}")
    spf = sieve.smallest_prime_factor
    lam = np.zeros(m + 1)
    lam[1] = 1.0
    level = form.level
    for n in range(2, m + 1):
        p = int(spf[n])
        r = n // p
        e = 1
        while r % p == 0:
            r //= p
            e += 1
        if r > 1:
            lam[n] = lam[n // r] * lam[r]
        elif e == 1:
            try:
                lam[n] = prime_values[p]
            except KeyError:
                raise DomainError(f"no prime coefficient supplied for p={p}") from None
        else:
            chi0 = 0.0 if level % p == 0 else 1.0
            lam[n] = lam[p] * lam[n // p] - chi0 * lam[n // (p * p)]
    return lam


def build_table(form: Newform, m: int, sieve: SieveTables) -> CoefficientTable:
    """Coefficient table for a built-in form kind, Deligne-checked."""
    if form.kind == "eta24-delta":
        values = delta_coefficients(m)
    elif form.kind == "elliptic-curve":
        assert form.curve_coeffs is not None
        if sieve.limit < m:
            raise TableTooShortError(
                f"sieve limit {sieve.limit} below table length {m}"
            )
        primes = sieve.primes
        primes = primes[primes <= m]
        pv: dict[int, float] = {}
        for p in primes:
            p = int(p)
            pv[p] = elliptic_ap(form.curve_coeffs, p) / math.sqrt(p)
        values = hecke_extend(form, pv, m, sieve)
    else:
        raise DomainError(f"no builder for form kind {form.kind}")
    table = CoefficientTable(form=form, values=values)
    _check_deligne(table)
    return table


def _check_deligne(table: CoefficientTable) -> None:
    """|lambda(n)| <= d(n) for every tabulated n; a violation is a bug."""
    m = table.length
    d = divisor_counts(m)
    bad = np.abs(table.values[1:]) > d[1:] + 1e-9
    if np.any(bad):
        n = int(np.flatnonzero(bad)[0]) + 1
        raise VerificationError(
            f"coefficient bound violated at n={n} for {table.form.label}: "
            f"|{table.values[n]}| > d({n})={d[n]}"
        )


# -- Fricke sign detection -------------------------------------------------


def _theta_value(table: CoefficientTable, t: float) -> float:
    """F(t) = sum lambda(n) n^((k-1)/2) exp(-2 pi n t / sqrt(level))."""
    kappa = table.form.weight
    rootq = math.sqrt(table.form.level)
    n = np.arange(1, table.length + 1, dtype=np.float64)
    return float(
        np.sum(table.values[1:] * n ** ((kappa - 1) / 2.0) * np.exp(-2.0 * math.pi * n * t / rootq))
    )


def _theta_tail(table: CoefficientTable, t: float) -> float:
    """Bound on the omitted tail of F(t) past the table length."""
    kappa = table.form.weight
    c = 2.0 * math.pi * t / math.sqrt(table.form.level)
    m = table.length
    ratio = math.exp(-c) * (1.0 + 1.0 / m) ** (kappa / 2.0)
    if ratio >= 1.0:
        return math.inf
    lead = _SQRT3 * math.exp((kappa / 2.0) * math.log(m + 1.0) - c * (m + 1.0))
    return lead / (1.0 - ratio)


def _fricke_probe(table: CoefficientTable, t: float, tail_tol: float) -> tuple[float, bool]:
    """Return (eta estimate, usable flag) from one scaling point t."""
    t_small = min(t, 1.0 / t)
    tail = _theta_tail(table, t_small)
    if not tail < tail_tol:
        raise TableTooShortError(
            f"theta tail {tail:.2e} at t={t_small} exceeds {tail_tol}; "
            f"extend the coefficient table for {table.form.label}"
        )
    f_t = _theta_value(table, t)
    f_inv = _theta_value(table, 1.0 / t)
    if abs(f_t) < 10.0 * tail or abs(f_inv) < 10.0 * tail:
        return 0.0, False
    kappa = table.form.weight
    i_k = -1.0 if kappa % 4 else 1.0
    return f_inv / (i_k * t**kappa * f_t), True


def determine_fricke_sign(
    table: CoefficientTable,
    t: float = 1.25,
    t_second: float = 1.6,
    tail_tol: float = 1e-12,
) -> int:
    """Detect the Fricke eigenvalue from F(1/t) = eta i^k t^k F(t).

    Probes two scaling points; both must give the same clean sign.  A
    probe too close to a zero of F is discarded, and if both are, the
    result is declared indeterminate rather than guessed.
    """
    if t <= 0 or t == 1.0 or t_second <= 0 or t_second == 1.0:
        raise DomainError("probe points must be positive and distinct from 1")
    estimates = []
    for probe in (t, t_second):
        est, ok = _fricke_probe(table, probe, tail_tol)
        if ok:
            estimates.append((probe, est))
    if not estimates:
        raise IndeterminateSignError(
            f"theta values at t={t}, {t_second} too small to read a sign"
        )
    signs = []
    for probe, est in estimates:
        sign = 1 if est > 0 else -1
        if abs(est - sign) > 1e-6:
            raise SignInconsistencyError(
                f"involution ratio {est} at t={probe} is not near +-1"
            )
        signs.append(sign)
    if len(set(signs)) != 1:
        raise SignInconsistencyError(
            f"probes {t}, {t_second} disagree on the sign: {signs}"
        )
    return signs[0]


# -- built-in registry ------------------------------------------------------

_BUILTIN_SHELLS = {
    "delta": Newform(label="delta", weight=12, level=1, kind="eta24-delta"),
    "11a": Newform(
        label="11a",
        weight=2,
        level=11,
        kind="elliptic-curve",
        curve_coeffs=(0, -1, 1, -10, -20),
    ),
    "37a": Newform(
        label="37a",
        weight=2,
        level=37,
        kind="elliptic-curve",
        curve_coeffs=(0, 0, 1, -1, 0),
    ),
}

BUILTIN_LABELS = tuple(_BUILTIN_SHELLS)

_table_cache: dict[str, CoefficientTable] = {}


def get_form(label: str, m: int, sieve: SieveTables) -> CoefficientTable:
    """Table for a built-in form, with the Fricke sign detected and cached.

    Tables are grown monotonically: asking for a shorter length reuses the
    longest table built so far in this process.
    """
    if label not in _BUILTIN_SHELLS:
        raise DomainError(f"unknown form label {label!r}; known: {BUILTIN_LABELS}")
    cached = _table_cache.get(label)
    if cached is not None and cached.length >= m:
        return cached
    shell = _BUILTIN_SHELLS[label]
    # Floor the build length so the sign-detection tail bound is certifiable.
    build_len = max(m, 2048)
    table = build_table(shell, build_len, sieve)
    if cached is not None and cached.form.fricke is not None:
        eta = cached.form.fricke
    else:
        probe_len = min(build_len, 4096)
        probe = CoefficientTable(form=shell, values=table.values[: probe_len + 1])
        eta = determine_fricke_sign(probe)
    table.form = replace(shell, fricke=eta)
    _table_cache[label] = table
    return table


# -- arbitrary newforms from a coefficient file -----------------------------


def load_coefficient_file(path: str, sieve: SieveTables | None = None) -> CoefficientTable:
    """Import an arbitrary newform from a JSON coefficient file.

    Expected document: an object with "label" (str), "weight" (even int),
    "level" (odd int) and "values", the arithmetically normalized
    lambda(1..M) as a flat list.  The table has to pass the same Deligne
    bound as the built-in sources plus a multiplicativity spot check, and
    the Fricke sign is detected from the theta involution, never trusted;
    a "fricke" key in the file is cross-checked against detection.
    """
    del sieve  # same signature shape as the builders; not needed here
    with open(path, "rb") as fh:
        try:
            doc = json.load(fh)
        except ValueError as exc:
            raise DomainError(f"coefficient file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DomainError(f"coefficient file {path}: top level must be an object")
    missing = {"label", "weight", "level", "values"} - set(doc)
    if missing:
        raise DomainError(f"coefficient file {path} missing keys: {sorted(missing)}")
    form = Newform(
        label=str(doc["label"]),
        weight=int(doc["weight"]),
        level=int(doc["level"]),
        kind="coefficient-file",
    )
    raw = doc["values"]
    if not isinstance(raw, list) or len(raw) < 1:
        raise DomainError(f"coefficient file {path}: values must be a nonempty list")
    values = np.zeros(len(raw) + 1)
    values[1:] = np.asarray(raw, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise DomainError(f"coefficient file {path}: values must be finite")
    if abs(values[1] - 1.0) > 1e-12:
        raise DomainError(f"coefficient file {path}: lambda(1) must be 1")
    table = CoefficientTable(form=form, values=values)
    _check_deligne(table)
    _spot_check_multiplicative(table)
    eta = determine_fricke_sign(table)
    declared = doc.get("fricke")
    if declared is not None and int(declared) != eta:
        raise SignInconsistencyError(
            f"coefficient file {path} declares fricke={declared}, detection gives {eta}"
        )
    table.form = replace(form, fricke=eta)
    return table


def _spot_check_multiplicative(table: CoefficientTable) -> None:
    """Cheap coprime-pair consistency screen for imported tables."""
    lam = table.values
    limit = min(table.length, 512)
    d = divisor_counts(limit)
    for m in range(2, int(math.isqrt(limit)) + 1):
        for n in range(m + 1, limit // m + 1):
            if math.gcd(m, n) != 1:
                continue
            if abs(lam[m * n] - lam[m] * lam[n]) > 1e-8 * d[m * n]:
                raise VerificationError(
                    f"imported table {table.form.label} is not multiplicative "
                    f"at ({m},{n})"
                )
