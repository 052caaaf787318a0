"""Root numbers and AFE evaluation of twisted central values."""

import math

import numpy as np
import pytest

from twistmoment.arith import kronecker
from twistmoment.errors import DomainError, RamifiedTwistError, WrongSignError
from twistmoment.forms import Newform
from twistmoment.lfun import (
    TwistCharacter,
    afe_general_s,
    balanced_gross_mass,
    central_derivative,
    central_value,
    central_value_balanced,
    chi_vector,
    derivative_fd_oracle,
    make_twist,
    omega,
)

# omega(37a twist by 8d) reduces to the Legendre symbol (d|37) for d > 0
OMEGA_MINUS_D37 = 5
OMEGA_PLUS_D37 = 1


def test_character_validation(sieve):
    for bad in (0, 4, -6):
        with pytest.raises(DomainError):
            TwistCharacter(bad)
    with pytest.raises(DomainError):
        make_twist(45, sieve)  # 9 | 45
    make_twist(15, sieve)
    make_twist(-3, sieve)


def test_character_values(sieve):
    for d in (1, 3, -5, 7, -1):
        chi = TwistCharacter(d)
        assert chi.discriminant == 8 * d
        assert chi.sign_at_minus_one == (1 if d > 0 else -1)
        for n in range(1, 40):
            assert chi(n) == kronecker(8 * d, n)


def test_chi_vector_matches_direct(sieve):
    for d in (1, 5, -3, 15):
        chi = TwistCharacter(d)
        vec = chi_vector(chi, 300, sieve)
        assert vec[0] == 0
        for n in range(1, 301):
            assert vec[n] == kronecker(8 * d, n), (d, n)
        again = chi_vector(chi, 300, sieve)
        assert np.array_equal(vec, again)


def test_omega_delta_always_plus(tdelta, sieve):
    for d in (1, 3, 5, 7, 15, 21, 101):
        assert omega(tdelta.form, TwistCharacter(d)) == 1
    # negative twists flip chi(-1), hence the sign
    assert omega(tdelta.form, TwistCharacter(-1)) == -1


def test_omega_37a_sign_algebra(t37a, sieve):
    form = t37a.form
    assert form.fricke == 1
    for d in (1, 3, 5, 7, 13, 15, 21):
        expect = -kronecker(8 * d, -37)
        assert omega(form, TwistCharacter(d)) == expect
    # d=3 spelled out: i^2 * eta * chi_24(-37)
    assert omega(form, TwistCharacter(3)) == -kronecker(24, -37)


def test_omega_11a_plus_case(t11a, sieve):
    form = t11a.form
    assert form.fricke == -1
    hits = 0
    for d in (1, 3, 5, 7, 13, 15):
        if kronecker(8 * d, -11) == 1:
            assert omega(form, TwistCharacter(d)) == 1
            hits += 1
    assert hits > 0


def test_omega_ramified_and_unset_sign(t11a, sieve):
    with pytest.raises(RamifiedTwistError):
        omega(t11a.form, make_twist(11, sieve))
    blank = Newform(label="blank", weight=12, level=1, kind="eta24-delta")
    with pytest.raises(DomainError):
        omega(blank, TwistCharacter(1))


def test_central_value_prefactor_zero(t37a, sieve):
    cv = central_value(t37a, TwistCharacter(OMEGA_MINUS_D37), sieve=sieve)
    assert cv.value == 0.0
    assert cv.omega == -1
    assert cv.method == "afe"
    assert cv.truncation == 0


def test_central_value_against_balanced(tdelta, sieve):
    chi = TwistCharacter(1)
    plain = central_value(tdelta, chi, sieve=sieve)
    bal = central_value_balanced(tdelta, chi, balance=1.0, sieve=sieve)
    assert bal.method == "balanced-afe"
    assert plain.value == pytest.approx(bal.value, abs=1e-8)
    assert plain.tail_estimate < 1e-8


def test_central_value_truncation_stability(tdelta, sieve):
    chi = TwistCharacter(5)
    loose = central_value(tdelta, chi, tol=1e-6, sieve=sieve)
    tight = central_value(tdelta, chi, tol=1e-10, sieve=sieve)
    assert abs(loose.value - tight.value) < 1e-6
    assert loose.truncation < tight.truncation


def test_balance_invariance_sample(tdelta, t37a, sieve):
    for table, d in ((tdelta, 1), (tdelta, 13), (t37a, OMEGA_PLUS_D37)):
        chi = TwistCharacter(d)
        vals = [
            central_value_balanced(table, chi, balance=a, sieve=sieve).value
            for a in (0.5, 1.0, 2.0)
        ]
        assert max(vals) - min(vals) < 1e-8, (table.form.label, d)


def test_balanced_vanishing_when_sign_negative(t37a, sieve):
    chi = TwistCharacter(OMEGA_MINUS_D37)
    bal = central_value_balanced(t37a, chi, balance=1.0, sieve=sieve)
    gross = balanced_gross_mass(t37a, chi, balance=1.0, sieve=sieve)
    assert gross > 1.0
    assert abs(bal.value) < 1e-8 * gross


def test_balance_validation(tdelta, sieve):
    with pytest.raises(DomainError):
        central_value_balanced(tdelta, TwistCharacter(1), balance=0.0, sieve=sieve)
    with pytest.raises(DomainError):
        central_value_balanced(tdelta, TwistCharacter(1), balance=-2.0, sieve=sieve)


def test_derivative_against_difference_oracle(t37a, sieve):
    chi = TwistCharacter(OMEGA_MINUS_D37)
    dv = central_derivative(t37a, chi, sieve=sieve)
    fd = derivative_fd_oracle(t37a, chi, sieve=sieve)
    assert dv.omega == -1
    assert abs(dv.value - fd) < 1e-5 * (1.0 + abs(dv.value))


def test_derivative_refuses_plus_sign(t37a, tdelta, sieve):
    with pytest.raises(WrongSignError):
        central_derivative(t37a, TwistCharacter(OMEGA_PLUS_D37), sieve=sieve)
    with pytest.raises(WrongSignError):
        central_derivative(tdelta, TwistCharacter(1), sieve=sieve)


def test_derivative_tail_contract(t37a, sieve):
    chi = TwistCharacter(OMEGA_MINUS_D37)
    loose = central_derivative(t37a, chi, tol=1e-6, sieve=sieve)
    tight = central_derivative(t37a, chi, tol=1e-10, sieve=sieve)
    assert loose.tail_estimate < 1e-6
    assert abs(loose.value - tight.value) <= loose.tail_estimate + 1e-12


def test_general_s_matches_central_value(tdelta, sieve):
    chi = TwistCharacter(1)
    at_center = afe_general_s(tdelta, chi, 0.5, sieve=sieve)
    cv = central_value(tdelta, chi, sieve=sieve)
    assert abs(at_center.imag) < 1e-10
    assert abs(at_center.real - cv.value) < 1e-8


def test_general_s_forced_zero(t37a, sieve):
    val = afe_general_s(t37a, TwistCharacter(OMEGA_MINUS_D37), 0.5, sieve=sieve)
    assert abs(val) < 1e-8


def test_general_s_conjugate_symmetry(tdelta, sieve):
    chi = TwistCharacter(3)
    s = 0.5 + 0.03j
    a = afe_general_s(tdelta, chi, s, sieve=sieve)
    b = afe_general_s(tdelta, chi, s.conjugate(), sieve=sieve)
    assert abs(b - a.conjugate()) < 1e-10 * (1.0 + abs(a))


def test_general_s_domain_restriction(tdelta, sieve):
    with pytest.raises(DomainError):
        afe_general_s(tdelta, TwistCharacter(1), 0.7, sieve=sieve)
    with pytest.raises(DomainError):
        afe_general_s(tdelta, TwistCharacter(1), 0.5 + 0.2j, sieve=sieve)


def test_ramified_twist_rejected_by_evaluators(t11a, sieve):
    with pytest.raises(RamifiedTwistError):
        central_value(t11a, make_twist(33, sieve), sieve=sieve)
