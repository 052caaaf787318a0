"""Acceptance gate: one test per shipped criterion, in contract order.

Each test prints a single summary line on success so a log scan shows
the whole gate at a glance.  Stated runtime budgets are asserted with
perf_counter; the informational criteria (10, 11) have no budget.
"""

import math
import time

import numpy as np

from twistmoment import cli
from twistmoment.arith import divisor_counts
from twistmoment.euler import E_at_origin, constant_Cfg
from twistmoment.forms import delta_tau, determine_fricke_sign, get_form
from twistmoment.gauss import gauss_brute, gauss_fast, poisson_verify
from twistmoment.kernels import w1_contour, w2_contour
from twistmoment.lfun import (
    balanced_gross_mass,
    central_derivative,
    central_value_balanced,
    derivative_fd_oracle,
    make_twist,
    omega,
    suite_for,
)
from twistmoment.moment import decompose_I, run_moment
from twistmoment.smooth import make_bump_J, make_partition_G


def _admissible_ds(level, count):
    # odd squarefree, coprime to the level, smallest first
    out = []
    d = 1
    while len(out) < count:
        if math.gcd(d, level) == 1:
            try:
                make_twist(d)
            except Exception:
                pass
            else:
                out.append(d)
        d += 2
    return out


def test_criterion_01_gauss_oracle_equivalence(sieve):
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 3001, 2):
        cap = 1e-8 * n
        for k in range(-50, 51):
            diff = abs(gauss_fast(k, n, sieve).value - gauss_brute(k, n, sieve).value)
            assert diff < cap, (k, n, diff)
            worst = max(worst, diff / n)
    elapsed = time.perf_counter() - t0
    assert elapsed < 120.0
    print(f"criterion 01 PASS gauss oracle: worst err/n {worst:.2e} < 1e-8, {elapsed:.1f}s < 120s")


def test_criterion_02_poisson_summation(sieve):
    t0 = time.perf_counter()
    weights = (make_bump_J(), make_partition_G())
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 500)) * 2 + 1
        z = float(rng.uniform(50.0, 500.0))
        for w in weights:
            rec = poisson_verify(n, z, w, sieve)
            assert rec.abs_err < 1e-8 * (1.0 + abs(rec.lhs)), (n, z, w.kind)
            worst = max(worst, rec.rel_err)
    elapsed = time.perf_counter() - t0
    assert elapsed < 120.0
    print(f"criterion 02 PASS poisson: worst rel err {worst:.2e} < 1e-8, {elapsed:.1f}s < 120s")


def test_criterion_03_kernel_closed_forms():
    t0 = time.perf_counter()
    worst = 0.0
    for kappa in (2, 12):
        suite = suite_for(kappa)
        for x in (0.1, 1.0, 10.0):
            d1 = abs(suite.w1(x) - w1_contour(kappa, x))
            d2 = abs(suite.w2(x) - w2_contour(kappa, x))
            assert d1 < 1e-8 and d2 < 1e-8, (kappa, x, d1, d2)
            worst = max(worst, d1, d2)
        limit = abs(suite.w1(1e-12) - 1.0)
        assert limit < 1e-10, kappa
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    print(f"criterion 03 PASS kernels: worst contour gap {worst:.2e} < 1e-8, {elapsed:.1f}s < 10s")


def test_criterion_04_balanced_parameter_invariance(tdelta, t11a, t37a, sieve):
    t0 = time.perf_counter()
    checked = 0
    vanished = 0
    worst = 0.0
    for table in (tdelta, t11a, t37a):
        ds = _admissible_ds(table.form.level, 20)
        if table.form.label == "delta":
            # positive d all carry sign +1 for weight 12 level 1, so the
            # vanishing clause needs a few negative discriminants
            ds = ds + [-1, -3, -5]
        minus = 0
        for d in ds:
            chi = make_twist(d, sieve)
            vals = [
                central_value_balanced(table, chi, balance=a, sieve=sieve).value
                for a in (0.5, 1.0, 2.0)
            ]
            spread = max(vals) - min(vals)
            assert spread < 1e-8, (table.form.label, d, spread)
            worst = max(worst, spread)
            checked += 1
            if omega(table.form, chi) == -1:
                minus += 1
                gross = balanced_gross_mass(table, chi, balance=1.0, sieve=sieve)
                assert abs(vals[1]) < 1e-7 * gross, (table.form.label, d)
                vanished += 1
        assert len(ds) >= 20 and minus >= 1, table.form.label
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0
    print(
        f"criterion 04 PASS balance: {checked} twists spread < 1e-8 "
        f"(worst {worst:.2e}), {vanished} odd-sign vanishings, {elapsed:.1f}s < 300s"
    )


def test_criterion_05_derivative_oracle(t37a, sieve):
    t0 = time.perf_counter()
    ds = [5, 13, 15, 17, 19, 23, 29, 31, 35, 39]
    worst = 0.0
    for d in ds:
        chi = make_twist(d, sieve)
        assert omega(t37a.form, chi) == -1, d
        dv = central_derivative(t37a, chi, sieve=sieve).value
        # small h with a tight evaluation tolerance keeps the oracle's own
        # discretization floor (h^2 term against tol/h) below the contract
        fd = derivative_fd_oracle(t37a, chi, h=5e-4, tol=1e-10, sieve=sieve)
        rel = abs(dv - fd) / (1.0 + abs(dv))
        assert rel < 1e-5, (d, dv, fd)
        worst = max(worst, rel)
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0
    print(f"criterion 05 PASS derivative: 10 twists, worst rel {worst:.2e} < 1e-5, {elapsed:.1f}s < 300s")


def test_criterion_06_hecke_deligne_suite(tdelta, t11a, t37a):
    t0 = time.perf_counter()
    top = 100_000
    dc = divisor_counts(top).astype(np.float64)
    for table in (tdelta, t11a, t37a):
        lam = table.values[: top + 1]
        assert np.all(np.abs(lam[1:]) <= dc[1:] + 1e-9), table.form.label
        for m in range(2, 317):
            n = np.arange(2, top // m + 1)
            n = n[np.gcd(n, m) == 1]
            gap = np.abs(lam[m * n] - lam[m] * lam[n])
            assert np.all(gap <= 1e-10 * dc[m * n]), (table.form.label, m)
    tau = delta_tau(3)
    assert tau[2] == -24 and tau[3] == 252
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"criterion 06 PASS hecke/deligne: 3 forms to n=1e5, tau(2)=-24 tau(3)=252, {elapsed:.1f}s < 60s")


def test_criterion_07_fricke_detection(tdelta, t11a, t37a):
    t0 = time.perf_counter()
    expected = {"delta": 1, "37a": 1, "11a": -1}
    for table in (tdelta, t37a, t11a):
        for t in (1.1, 1.2, 1.5, 2.0):
            assert determine_fricke_sign(table, t=t) == expected[table.form.label]
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    print(f"criterion 07 PASS fricke: +1 delta/37a, -1 11a across 4 probes, {elapsed:.1f}s < 10s")


def test_criterion_08_euler_product_structure(tdelta, t11a, t37a, sieve):
    t0 = time.perf_counter()
    worst = 0.0
    for cutoff in (1000, 10_000):
        rep = constant_Cfg(t11a, t37a, cutoff, sieve)
        resid = abs(
            rep.E_values[1] * rep.E_values[11 * 37]
            - rep.E_values[11] * rep.E_values[37]
        )
        assert resid < 1e-12, cutoff
        worst = max(worst, resid)
    deltas = [
        E_at_origin(tdelta, t37a, 1, cutoff, sieve).delta
        for cutoff in (1000, 10_000, 100_000)
    ]
    assert deltas[0] > deltas[1] > deltas[2]
    rep = constant_Cfg(t37a, tdelta, 1000, sieve)
    assert rep.predicted_vanishing and rep.C_fg_factored == 0.0
    elapsed = time.perf_counter() - t0
    assert elapsed < 180.0
    print(
        f"criterion 08 PASS euler: residual {worst:.2e} < 1e-12, deltas "
        f"{deltas[0]:.2e}>{deltas[1]:.2e}>{deltas[2]:.2e}, degenerate sign vanishes, {elapsed:.1f}s < 180s"
    )


def test_criterion_09_decomposition_identity(tdelta, t37a, sieve):
    t0 = time.perf_counter()
    run = run_moment(tdelta, t37a, 2048.0, make_bump_J(), tol=1e-6, threads=8, sieve=sieve)
    worst = 0.0
    for y in (512.0, 2048.0, 8192.0):
        i1, i2, i3, i4 = decompose_I(run, y, sieve)
        rel = abs(0.25 * (i1 + i2 + i3 + i4) - run.s_j) / max(1.0, abs(run.s_j))
        assert rel < 1e-6, (y, rel)
        worst = max(worst, rel)
    elapsed = time.perf_counter() - t0
    assert elapsed < 900.0
    print(
        f"criterion 09 PASS decomposition: X=2048, {len(run.records)} records, "
        f"worst rel {worst:.2e} < 1e-6 over three Y, {elapsed:.1f}s < 900s"
    )


def test_criterion_10_moment_determinism(tmp_path):
    argv = ["moment", "--x", "160", "--primes", "1000", "--tol", "1e-6", "--y-split", "0.25,1"]
    outs = []
    for sub in ("a", "b"):
        out_dir = tmp_path / sub
        assert cli.main(argv + ["--out", str(out_dir)]) == 0
        outs.append(out_dir)
    for name in ("moment_x160.csv", "moment_x160.json"):
        first = (outs[0] / name).read_bytes()
        second = (outs[1] / name).read_bytes()
        assert first == second, name
    assert (outs[0] / "run_meta.json").exists()
    print("criterion 10 PASS determinism: repeated runs byte-identical CSV and JSON")


def test_criterion_11_informational_moment_ratio(sieve):
    grid = (1024.0, 2048.0, 4096.0, 8192.0)
    weight = make_bump_J()
    d_max = int(grid[-1] * weight.support[1] / 8.0)
    lengths = {}
    for label, kappa, level in (("delta", 12, 1), ("37a", 2, 37)):
        scale = 8.0 * d_max * math.sqrt(level)
        lengths[label] = suite_for(kappa).truncation_length(scale, 5e-7)
    tf = get_form("delta", lengths["delta"], sieve)
    tg = get_form("37a", lengths["37a"], sieve)
    ratios = {}
    for x in grid:
        run = run_moment(tf, tg, x, weight, tol=1e-6, threads=8, sieve=sieve, prime_cutoff=1000)
        assert run.prediction is not None and math.isfinite(run.prediction)
        assert run.ratio is not None and math.isfinite(run.ratio)
        assert run.attrition.candidates > 0
        assert run.attrition.admissible == len(run.records) > 0
        assert math.isfinite(run.error_budget) and run.error_budget > 0.0
        ratios[int(x)] = run.ratio
    shown = ", ".join(f"X={x}: {r:+.4f}" for x, r in ratios.items())
    print(f"criterion 11 PASS informational: S_J over prediction finite at all X ({shown})")
