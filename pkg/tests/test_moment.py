"""Mixed first-moment harness: family enumeration, evaluation, splitting."""

import math

import pytest

from twistmoment.errors import DomainError, EmptyFamilyError
from twistmoment.moment import (
    decompose_I,
    enumerate_admissible,
    recompute_sum,
    run_moment,
)
from twistmoment.smooth import SmoothWeight, make_bump_J

# frozen attrition for X = 10^4, pair (delta, 37a), bump support [1/2, 2];
# cross-computed with a standalone sieve-free script
X4_CANDIDATES = 1876
X4_PARITY = 938
X4_SQUAREFREE = 176
X4_GCD = 20
X4_SIGNS = 371
X4_ADMISSIBLE = 371
X4_FIRST_FIVE = [627, 631, 635, 643, 647]
X4_LAST = 2497


def test_candidate_range_small(tdelta, t37a, sieve):
    twists, attr = enumerate_admissible(tdelta, t37a, 160.0, make_bump_J(), sieve)
    # support [1/2, 2] puts d in [10, 40]
    assert attr.candidates == 31
    assert all(10 <= chi.d <= 40 for chi in twists)
    total = (
        attr.failing_parity
        + attr.failing_squarefree
        + attr.failing_gcd
        + attr.failing_signs
        + attr.admissible
    )
    assert total == attr.candidates


def test_attrition_oracle_x_ten_thousand(tdelta, t37a, sieve):
    twists, attr = enumerate_admissible(tdelta, t37a, 1e4, make_bump_J(), sieve)
    assert attr.candidates == X4_CANDIDATES
    assert attr.failing_parity == X4_PARITY
    assert attr.failing_squarefree == X4_SQUAREFREE
    assert attr.failing_gcd == X4_GCD
    assert attr.failing_signs == X4_SIGNS
    assert attr.admissible == X4_ADMISSIBLE
    ds = [chi.d for chi in twists]
    assert ds[:5] == X4_FIRST_FIVE
    assert ds[-1] == X4_LAST
    assert ds == sorted(ds)
    # the sign filter sees only the second form's root number here, so it
    # halves the eligible pool exactly
    eligible = attr.candidates - attr.failing_parity - attr.failing_squarefree - attr.failing_gcd
    assert attr.admissible * 2 == eligible


def test_small_x_rejected(tdelta, t37a, sieve):
    with pytest.raises(DomainError):
        enumerate_admissible(tdelta, t37a, 8.0, make_bump_J(), sieve)


def test_empty_family_is_degenerate_run(t37a, tdelta, sieve):
    # second slot needs root number -1, which the level-one form never has
    with pytest.raises(EmptyFamilyError):
        enumerate_admissible(t37a, tdelta, 160.0, make_bump_J(), sieve)
    run = run_moment(t37a, tdelta, 160.0, make_bump_J(), sieve=sieve)
    assert run.records == []
    assert run.s_j == 0.0
    assert run.attrition.admissible == 0
    assert run.prediction is None
    assert run.jhat0 > 0


def test_run_small_x(tdelta, t37a, sieve):
    run = run_moment(tdelta, t37a, 160.0, make_bump_J(), sieve=sieve)
    assert run.labels == ("delta", "37a")
    assert len(run.records) == run.attrition.admissible > 0
    for rec in run.records:
        assert rec.omega_f == 1
        assert rec.omega_g == -1
        assert rec.j_weight > 0
        assert rec.truncation_f > 0 and rec.truncation_g > 0
    assert recompute_sum(run.records) == run.s_j
    assert run.error_budget > 0
    assert run.error_budget < 1e-3


def test_weight_linearity(tdelta, t37a, sieve):
    j = make_bump_J()
    doubled = SmoothWeight(kind=j.kind, support=j.support, fn=lambda x: 2.0 * j.fn(x))
    base = run_moment(tdelta, t37a, 160.0, j, sieve=sieve)
    twice = run_moment(tdelta, t37a, 160.0, doubled, sieve=sieve)
    assert twice.s_j == 2.0 * base.s_j
    assert [r.d for r in twice.records] == [r.d for r in base.records]


def test_thread_count_immaterial(tdelta, t37a, sieve):
    one = run_moment(tdelta, t37a, 160.0, make_bump_J(), threads=1, sieve=sieve)
    four = run_moment(tdelta, t37a, 160.0, make_bump_J(), threads=4, sieve=sieve)
    assert one.records == four.records
    assert one.s_j == four.s_j
    with pytest.raises(DomainError):
        run_moment(tdelta, t37a, 160.0, make_bump_J(), threads=0, sieve=sieve)


def test_split_identity_small_x(tdelta, t37a, sieve):
    run = run_moment(tdelta, t37a, 160.0, make_bump_J(), sieve=sieve)
    for y in (40.0, 160.0, 640.0):
        parts = decompose_I(run, y, sieve)
        total = math.fsum(parts) / 4.0
        assert abs(total - run.s_j) < 1e-12 * (1.0 + abs(run.s_j)), y
        assert run.y_split[y] == parts
    # the identity is Y-independent but the split itself is not
    assert run.y_split[40.0] != run.y_split[640.0]


def test_split_tiny_y_collapses_to_tail_block(tdelta, t37a, sieve):
    run = run_moment(tdelta, t37a, 160.0, make_bump_J(), sieve=sieve)
    i1, i2, i3, i4 = decompose_I(run, 0.01, sieve)
    assert abs(i4 / 4.0 - run.s_j) < 1e-12 * (1.0 + abs(run.s_j))
    for small in (i1, i2, i3):
        assert abs(small) < 1e-12 * (1.0 + abs(i4))


def test_split_rejects_bad_scale(tdelta, t37a, sieve):
    run = run_moment(tdelta, t37a, 160.0, make_bump_J(), sieve=sieve)
    with pytest.raises(DomainError):
        decompose_I(run, 0.0, sieve)
    with pytest.raises(DomainError):
        decompose_I(run, -3.0, sieve)


def test_prediction_attached(tdelta, t37a, sieve):
    run = run_moment(
        tdelta, t37a, 160.0, make_bump_J(), sieve=sieve, prime_cutoff=1000
    )
    assert run.constant is not None
    assert run.prediction == pytest.approx(
        run.constant.C_fg * run.jhat0 * 160.0 * math.log(160.0)
    )
    assert math.isfinite(run.ratio)
    assert run.ratio != 0
