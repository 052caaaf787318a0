"""The mixed first-moment harness over a quadratic twist family.

For a smooth bump J and a size parameter X, the family is the set of
odd squarefree d > 0 with 8d/X inside the support of J, coprime to both
levels, whose twists give root number +1 for the first form and -1 for
the second.  The harness evaluates

    S_J = sum_d  L(1/2, f twist) * L'(1/2, g twist) * J(8d/X)

record by record in ascending d, compares against the predicted leading
term C * Jhat(0) * X log X, and verifies the four-way splitting of the
sum induced by truncating each series at a free scale Y.

Work is split across a thread pool per d, but the reduction is a fixed
ascending-d fold, so the emitted numbers are identical for any thread
count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arith import SieveTables, default_sieve, kronecker
from .errors import DomainError, EmptyFamilyError
from .euler import EulerConstantReport, constant_Cfg
from .forms import CoefficientTable
from .gauss import jacobi_vector
from .lfun import (
    TwistCharacter,
    chi_vector,
    kernel_sum_w1,
    kernel_sum_w2,
    suite_for,
)
from .smooth import SmoothWeight

_ADMISSIBLE_OMEGAS = (1, -1)  # required root numbers for (f, g) twists


@dataclass(frozen=True)
class Attrition:
    """Sequential filter counts; the stages partition the candidates."""

    candidates: int
    failing_parity: int
    failing_squarefree: int
    failing_gcd: int
    failing_signs: int
    admissible: int

    def as_dict(self) -> dict:
        return {
            "candidates": self.candidates,
            "failing_parity": self.failing_parity,
            "failing_squarefree": self.failing_squarefree,
            "failing_gcd": self.failing_gcd,
            "failing_signs": self.failing_signs,
            "admissible": self.admissible,
        }


@dataclass(frozen=True)
class MomentRecord:
    d: int
    omega_f: int
    omega_g: int
    l_value: float
    l_deriv: float
    j_weight: float
    truncation_f: int
    truncation_g: int


@dataclass
class MomentRun:
    x: float
    tables: tuple[CoefficientTable, CoefficientTable]
    weight: SmoothWeight
    tol: float
    records: list[MomentRecord]
    s_j: float
    attrition: Attrition
    jhat0: float
    constant: EulerConstantReport | None = None
    prediction: float | None = None
    ratio: float | None = None
    error_budget: float = 0.0
    y_split: dict[float, tuple[float, float, float, float]] = field(default_factory=dict)

    @property
    def labels(self) -> tuple[str, str]:
        return (self.tables[0].form.label, self.tables[1].form.label)


def _omega_signs(
    table: CoefficientTable, d: np.ndarray, sieve: SieveTables
) -> np.ndarray:
    """Vectorized root numbers over positive twist parameters d."""
    form = table.form
    if form.fricke is None:
        raise DomainError(f"form {form.label} has no detected involution sign")
    s = (-1 if form.weight % 4 else 1) * form.fricke
    q = form.level
    jac = jacobi_vector(q, sieve).astype(np.int64)
    return s * kronecker(8, q) * jac[d % q]


def enumerate_admissible(
    table_f: CoefficientTable,
    table_g: CoefficientTable,
    x: float,
    weight: SmoothWeight,
    sieve: SieveTables | None = None,
) -> tuple[list[TwistCharacter], Attrition]:
    """All admissible d in ascending order, plus the filter bookkeeping.

    Candidates are every integer d with 8d/X inside the support of the
    weight; the filters (odd, squarefree, coprime to the levels, root
    numbers +1/-1) are applied sequentially so the attrition counts
    partition the candidate set.
    """
    if x < 16:
        raise DomainError(f"need X >= 16 for a nonempty candidate range, got {x}")
    lo, hi = weight.support
    d_lo = max(1, int(math.ceil(x * lo / 8.0)))
    d_hi = int(math.floor(x * hi / 8.0))
    sieve = sieve or default_sieve(max(d_hi + 1, 16))
    d = np.arange(d_lo, d_hi + 1, dtype=np.int64)
    n_candidates = len(d)

    odd = (d % 2) == 1
    n_parity = int(np.sum(~odd))
    d = d[odd]

    if sieve.limit < d_hi:
        raise DomainError(f"sieve limit {sieve.limit} below candidate bound {d_hi}")
    sqf = sieve.is_squarefree[d]
    n_sqf = int(np.sum(~sqf))
    d = d[sqf]

    qq = table_f.form.level * table_g.form.level
    cop = np.gcd(d, qq) == 1
    n_gcd = int(np.sum(~cop))
    d = d[cop]

    wf = _omega_signs(table_f, d, sieve)
    wg = _omega_signs(table_g, d, sieve)
    keep = (wf == _ADMISSIBLE_OMEGAS[0]) & (wg == _ADMISSIBLE_OMEGAS[1])
    n_signs = int(np.sum(~keep))
    d = d[keep]

    attrition = Attrition(
        candidates=n_candidates,
        failing_parity=n_parity,
        failing_squarefree=n_sqf,
        failing_gcd=n_gcd,
        failing_signs=n_signs,
        admissible=len(d),
    )
    if len(d) == 0:
        err = EmptyFamilyError(
            f"no admissible twist parameters for X={x}: {attrition.as_dict()}"
        )
        err.attrition = attrition
        raise err
    return [TwistCharacter(int(dd)) for dd in d], attrition


def _evaluate_one(
    table_f: CoefficientTable,
    table_g: CoefficientTable,
    chi: TwistCharacter,
    jw: float,
    tol: float,
    sieve: SieveTables,
) -> MomentRecord:
    """L, L' and the weight for one twist; the character vector is shared."""
    suite_f = suite_for(table_f.form.weight)
    suite_g = suite_for(table_g.form.weight)
    scale_f = 8.0 * chi.d * math.sqrt(table_f.form.level)
    scale_g = 8.0 * chi.d * math.sqrt(table_g.form.level)
    m_f = suite_f.truncation_length(scale_f, tol / 2.0)
    m_g = suite_g.truncation_length(scale_g, tol / 2.0)
    table_f.require_length(m_f)
    table_g.require_length(m_g)
    vec = chi_vector(chi, max(m_f, m_g), sieve)
    l_f = 2.0 * kernel_sum_w1(table_f, vec, suite_f, m_f, scale_f)
    l_g = 2.0 * kernel_sum_w2(table_g, vec, suite_g, m_g, scale_g)
    return MomentRecord(
        d=chi.d,
        omega_f=1,
        omega_g=-1,
        l_value=l_f,
        l_deriv=l_g,
        j_weight=jw,
        truncation_f=m_f,
        truncation_g=m_g,
    )


def recompute_sum(records: list[MomentRecord]) -> float:
    """S_J as the exact fold the run itself uses (fsum over ascending d)."""
    return math.fsum(r.l_value * r.l_deriv * r.j_weight for r in records)


def run_moment(
    table_f: CoefficientTable,
    table_g: CoefficientTable,
    x: float,
    weight: SmoothWeight,
    tol: float = 1e-6,
    threads: int = 1,
    sieve: SieveTables | None = None,
    prime_cutoff: int | None = None,
) -> MomentRun:
    """Full moment evaluation at one X, with prediction if a cutoff is given.

    Per-twist failures propagate: a family member that cannot be
    evaluated aborts the run rather than being dropped silently.
    """
    if threads < 1:
        raise DomainError("thread count must be >= 1")
    try:
        twists, attrition = enumerate_admissible(table_f, table_g, x, weight, sieve)
    except EmptyFamilyError as err:
        # An empty family is a valid degenerate run: S_J = 0, no prediction.
        return MomentRun(
            x=float(x),
            tables=(table_f, table_g),
            weight=weight,
            tol=tol,
            records=[],
            s_j=0.0,
            attrition=err.attrition,
            jhat0=weight.integral(),
        )
    sieve = sieve or default_sieve(int(x))
    jws = [float(weight(8.0 * chi.d / x)) for chi in twists]

    if threads == 1:
        records = [
            _evaluate_one(table_f, table_g, chi, jw, tol, sieve)
            for chi, jw in zip(twists, jws)
        ]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(
                pool.map(
                    lambda pair: _evaluate_one(table_f, table_g, pair[0], pair[1], tol, sieve),
                    zip(twists, jws),
                )
            )

    s_j = recompute_sum(records)
    budget = math.fsum(
        abs(r.j_weight) * tol * (abs(r.l_value) + abs(r.l_deriv) + tol) for r in records
    )
    jhat0 = weight.integral()
    run = MomentRun(
        x=float(x),
        tables=(table_f, table_g),
        weight=weight,
        tol=tol,
        records=records,
        s_j=s_j,
        attrition=attrition,
        jhat0=jhat0,
        error_budget=budget,
    )
    if prime_cutoff is not None:
        report = constant_Cfg(table_f, table_g, prime_cutoff, sieve)
        run.constant = report
        run.prediction = report.C_fg * jhat0 * x * math.log(x)
        run.ratio = s_j / run.prediction if run.prediction else math.inf
    return run


def decompose_I(
    run: MomentRun,
    y: float,
    sieve: SieveTables | None = None,
) -> tuple[float, float, float, float]:
    """Split S_J into the four partial moments induced by truncation at Y.

    Per twist, with S(Y) the kernel sum truncated at scale Y instead of
    the natural one:

        A  = 2 S_f(Y),    B  = 2 L  - A   (the tail of the doubled series)
        A' = 2 S'_g(Y),   B' = 2 L' - A'

    so A + B = 2L and A' + B' = 2L' exactly, giving the split identity
    S_J = (I1 + I2 + I3 + I4) / 4 at every Y.  As Y grows past every
    natural scale, S_f(Y) -> L and S'_g(Y) -> L', so B, B' -> 0 and I1
    carries everything; as Y -> 0 the weight mass dies and I4 does.
    """
    if y <= 0:
        raise DomainError(f"split scale must be positive, got {y}")
    table_f, table_g = run.tables
    sieve = sieve or default_sieve(int(run.x))
    suite_f = suite_for(table_f.form.weight)
    suite_g = suite_for(table_g.form.weight)
    m_f = suite_f.truncation_length(y, run.tol / 2.0)
    m_g = suite_g.truncation_length(y, run.tol / 2.0)
    table_f.require_length(m_f)
    table_g.require_length(m_g)

    # The Y-scale kernel vectors do not depend on d; hoist them.
    n_f = np.arange(1, m_f + 1, dtype=np.float64)
    w_f = suite_f.w1(n_f / y) / np.sqrt(n_f)
    n_g = np.arange(1, m_g + 1, dtype=np.float64)
    w_g = suite_g.w2(n_g / y) / np.sqrt(n_g)

    parts = [[], [], [], []]
    for rec in run.records:
        chi = TwistCharacter(rec.d)
        vec = chi_vector(chi, max(m_f, m_g), sieve)
        sf = float(np.dot(table_f.values[1 : m_f + 1] * vec[1 : m_f + 1], w_f))
        sg = float(np.dot(table_g.values[1 : m_g + 1] * vec[1 : m_g + 1], w_g))
        a_f = 2.0 * sf
        b_f = 2.0 * rec.l_value - a_f
        a_g = 2.0 * sg
        b_g = 2.0 * rec.l_deriv - a_g
        jw = rec.j_weight
        parts[0].append(a_f * a_g * jw)
        parts[1].append(a_f * b_g * jw)
        parts[2].append(b_f * a_g * jw)
        parts[3].append(b_f * b_g * jw)
    i_parts = tuple(math.fsum(p) for p in parts)
    run.y_split[float(y)] = i_parts
    return i_parts
