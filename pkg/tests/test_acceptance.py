"""Acceptance suite.  Each test prints one PASS/FAIL line with the measured
quantities, then asserts.  Run standalone with ``python tests/test_acceptance.py``."""

import time

import numpy as np
import pytest

from hallbounds import (
    CounterexampleVariant,
    HallBoundsError,
    L0Params,
    PhaseDistribution,
    TIConductivity,
    average_block_L,
    b_interval_check,
    build_block_L,
    circle_check,
    circle_params,
    counterexample_spec,
    counterexample_sweep,
    delta12,
    g_fun,
    g_quadrature,
    gamma_avg_adaptive,
    gamma_avg_closed,
    gamma_avg_closed_inverse,
    gamma_avg_numeric,
    gamma_relation_residual,
    hs_bounds,
    hs_coefficients,
    hs_disk_check,
    hs_matrix_verdicts,
    optimal_shift_check,
    order_phases,
    phase_circle_residual,
    psd_order_check,
    rank_one_effective,
    rank_two_effective,
    superfluous_check,
    y_tensor_matrix,
    y_tensor_ti,
)

GRID = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4)
SEED = 12345


@pytest.fixture
def report(capsys):
    def emit(number, ok, text):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}: {text}", flush=True)
    return emit


def _ti_phase(rng):
    return TIConductivity(rng.uniform(0.1, 10), rng.uniform(0.1, 10), rng.uniform(-5, 5))


def test_criterion_01_counterexample_plus_j(report):
    t0 = time.perf_counter()
    res = counterexample_sweep(17.0, CounterexampleVariant.PLUS_J, GRID)
    elapsed = time.perf_counter() - t0
    err = abs(res.limit_c + 1.0)
    ok = err <= 1e-5 and res.order >= 1.0 and elapsed < 1.0
    report(1, ok, f"limit c* = {res.limit_c:.9f} (|err| {err:.2e} <= 1e-5), "
                  f"order {res.order:.4f} (>= 1), runtime {elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_02_counterexample_hall_block(report):
    res = counterexample_sweep(13.0, CounterexampleVariant.HALL_BLOCK, GRID)
    err = abs(res.limit_c - 1.0)
    ok = err <= 1e-5
    report(2, ok, f"limit c* = {res.limit_c:.9f} (|err| {err:.2e} <= 1e-5)")
    assert ok


def test_criterion_03_minor_sign_change(report):
    kappa, theta = 17.0, 1e-3
    _, fields = rank_two_effective(counterexample_spec(theta, kappa))
    d2, d3 = delta12(fields.E2), delta12(fields.E3)
    predicted = -2 * kappa / (17 * theta)
    rel = abs(d3 / predicted - 1)
    ok = d2 * d3 < 0 and rel <= 0.05
    report(3, ok, f"Delta12(E2) = {d2:.4f}, Delta12(E3) = {d3:.4f}, predicted {predicted:.1f}, "
                  f"relative deviation {rel:.4f} (<= 0.05)")
    assert ok


def test_criterion_04_partial_isotropy(report):
    res = counterexample_sweep(17.0, CounterexampleVariant.PLUS_J, GRID)
    r, th = res.partial_iso_residuals, res.thetas
    C = r[0] / th[0]
    linear = bool(np.all(r <= 1.5 * C * th))
    decreasing = bool(np.all(np.diff(r) < 0))
    ok = linear and decreasing
    report(4, ok, f"residuals {np.array2string(r, precision=3)}, C = {C:.4f}, "
                  f"r <= 1.5 C theta: {linear}, strictly decreasing: {decreasing}")
    assert ok


def test_criterion_05_elementary_property_suite(report):
    rng = np.random.default_rng(SEED)
    worst_psd, psd_fail = np.inf, 0
    for _ in range(1000):
        pA, pB = _ti_phase(rng), _ti_phase(rng)
        xi = rng.normal(size=3)
        xi /= np.linalg.norm(xi)
        f = rng.uniform(0.01, 0.99)
        star = rank_one_effective(pA.matrix(), pB.matrix(), f, xi)
        avg = average_block_L(PhaseDistribution([(f, pA), (1 - f, pB)]))
        margin = np.linalg.eigvalsh(avg - build_block_L(star))[0]
        worst_psd = min(worst_psd, margin)
        psd_fail += not psd_order_check(build_block_L(star), avg, 1e-9)
    worst_scalar, scalar_fail = -np.inf, 0
    for _ in range(1000):
        pA, pB = _ti_phase(rng), _ti_phase(rng)
        f = rng.uniform(0.01, 0.99)
        star = rank_one_effective(pA.matrix(), pB.matrix(), f, [0, 0, 1])
        a, c, b = star[0, 0], star[1, 0], star[2, 2]
        d = PhaseDistribution([(f, pA), (1 - f, pB)])
        verdicts = [
            circle_check(a, c, circle_params(d)),
            b_interval_check(b, d),
            superfluous_check(a, c, d),
            optimal_shift_check(a, c, float(d.a.min()), float(d.c.max()), float(d.c.min())),
        ]
        for v in verdicts:
            worst_scalar = max(worst_scalar, v.residual)
            scalar_fail += v.residual > 1e-10
    ok = psd_fail == 0 and scalar_fail == 0
    report(5, ok, f"1000 random rank-one laminates: PSD failures {psd_fail}, worst margin {worst_psd:.3e}; "
                  f"1000 normal-e3 laminates: scalar failures {scalar_fail}, "
                  f"worst residual {worst_scalar:.3e} (<= 1e-10)")
    assert ok


def test_criterion_06_g_suite(report):
    r = np.logspace(-4, 4, 161)
    g = g_fun(r)
    quad = np.array([g_quadrature(x) for x in r])
    err_one = abs(g_fun(1.0) - 1 / 3)
    err_quad = float(np.abs(g - quad).max())
    monotone = bool(np.all(np.diff(g) > 0))
    in_range = bool(np.all((g > 0) & (g < 1)))
    ok = err_one <= 1e-14 and err_quad <= 1e-12 and monotone and in_range
    report(6, ok, f"|g(1) - 1/3| = {err_one:.1e}, max |closed - quadrature| = {err_quad:.1e} (<= 1e-12), "
                  f"monotone {monotone}, in (0,1) {in_range}")
    assert ok


def test_criterion_07_hs_coefficient_suite(report):
    rng = np.random.default_rng(SEED + 7)
    worst_t1 = worst_circle = worst_shift = 0.0
    s_order_fail = n = 0
    while n < 10_000:
        p1, p2 = _ti_phase(rng), _ti_phase(rng)
        p1, p2, f1, _ = order_phases(p1, p2, rng.uniform(0.05, 0.95))
        try:
            h = hs_coefficients(p1, p2)
        except HallBoundsError:
            continue
        n += 1
        for _, alpha, t1, s1 in h.branches():
            t1_other = p2.a / (p2.a**2 + (p2.c - alpha) ** 2)
            worst_t1 = max(worst_t1, abs(t1_other - t1) / t1)
            s_order_fail += not (0 < s1 < t1)
            for p in (p1, p2):
                worst_circle = max(worst_circle, abs(phase_circle_residual(p.a, p.c, alpha, t1)) / (p.a / t1))
        star = _ti_phase(rng)
        c0 = rng.uniform(-5, 5)
        try:
            y0 = y_tensor_ti(p1, p2, f1, star)
        except HallBoundsError:
            continue
        y1 = y_tensor_ti(p1.shifted(c0), p2.shifted(c0), f1, star.shifted(c0))
        h1 = hs_coefficients(p1.shifted(c0), p2.shifted(c0))
        for v0, v1 in zip(hs_disk_check(y0, h), hs_disk_check(y1, h1)):
            worst_shift = max(worst_shift, abs(v0.residual - v1.residual) / max(1.0, abs(v0.residual)))
    ok = worst_t1 <= 1e-12 and s_order_fail == 0 and worst_circle <= 1e-10 and worst_shift <= 1e-10
    report(7, ok, f"{n} pairs: t1 consistency {worst_t1:.1e} (<= 1e-12 rel), s1 order failures {s_order_fail}, "
                  f"phase-circle residual {worst_circle:.1e}, shift covariance {worst_shift:.1e} (<= 1e-10)")
    assert ok


def _random_l0(rng):
    t1, t4, t5 = rng.uniform(0.2, 5, 3)
    t2 = rng.uniform(-2, 2)
    return L0Params(t1, t2, t2**2 / t1 + rng.uniform(0.05, 3), t4, t5)


def test_criterion_08_gamma_verification(report):
    rng = np.random.default_rng(SEED + 8)
    t0 = time.perf_counter()
    worst_rel = 0.0
    for _ in range(1000):
        l0 = _random_l0(rng)
        xi = rng.normal(size=3)
        worst_rel = max(worst_rel, gamma_relation_residual(l0, xi / np.linalg.norm(xi), rng.normal(size=6)))
    worst_avg = 0.0
    for _ in range(20):
        l0 = _random_l0(rng)
        C = gamma_avg_closed(l0).matrix()
        worst_avg = max(worst_avg, np.abs(gamma_avg_numeric(l0, 128) - C).max() / np.abs(C).max())
    t1, t2, t4, t5 = 0.2, 0.4, 0.5, 1.0
    d1 = 1e-6
    avg, order = gamma_avg_adaptive(L0Params(t1, t2, t2**2 / t1 + d1, t4, t5))
    limit = gamma_avg_closed_inverse(L0Params.limit(t1, t2, t4, t5))
    inv = np.linalg.inv(avg)
    mask = np.abs(limit) > 0
    limit_rel = float((np.abs(inv - limit)[mask] / np.abs(limit)[mask]).max())
    elapsed = time.perf_counter() - t0
    parts = [worst_rel <= 1e-12, worst_avg <= 1e-10, limit_rel <= 1e-4, elapsed < 10.0]
    ok = all(parts)
    report(8, ok, f"relations {worst_rel:.1e} (<= 1e-12): {parts[0]}; numeric vs closed at order 128 "
                  f"{worst_avg:.1e} (<= 1e-10): {parts[1]}; inverse vs limit at d1=1e-6 "
                  f"{limit_rel:.2e} (<= 1e-4): {parts[2]}; runtime {elapsed:.2f}s (< 10s): {parts[3]}")
    assert ok


def test_criterion_09_scalar_matrix_equivalence(report):
    rng = np.random.default_rng(SEED + 9)
    cases = mismatches = satisfied = 0
    worst = 0.0
    while cases < 100:
        p1, p2 = _ti_phase(rng), _ti_phase(rng)
        f1 = rng.uniform(0.05, 0.95)
        if cases % 2:
            star = _ti_phase(rng)
        else:
            # near the phase averages, where the bounds can hold
            a = 1 / (f1 / p1.a + (1 - f1) / p2.a) * rng.uniform(1.0, 1.5)
            b = 1 / (f1 / p1.b + (1 - f1) / p2.b) * rng.uniform(1.0, 1.05)
            star = TIConductivity(a, b, f1 * p1.c + (1 - f1) * p2.c + rng.uniform(-0.3, 0.3))
        try:
            r = hs_bounds(p1, p2, f1, star)
        except HallBoundsError:
            continue
        cases += 1
        q1, q2 = r.phases
        matrix = hs_matrix_verdicts(r.y, r.coefficients, q1, q2)
        for k, (_, _, _, s1) in enumerate(r.coefficients.branches()):
            disk, bv, mv = r.disk_verdicts[k], r.b_verdicts[k], matrix[k]
            scalar_ok = disk.satisfied and bv.satisfied
            mismatches += scalar_ok != mv.satisfied
            satisfied += scalar_ok
            from_pair = -(r.y.a_Y / s1) * mv.inputs_echo["pair_det"]
            worst = max(worst, abs(from_pair - disk.residual) / max(1.0, abs(disk.residual)),
                        abs(mv.inputs_echo["axial_residual"] - bv.residual) / max(1.0, abs(bv.residual)))
    ok = mismatches == 0 and worst <= 1e-9
    report(9, ok, f"{cases} cases ({satisfied} satisfied branch checks): verdict mismatches {mismatches}, "
                  f"residual discrepancy {worst:.1e} (<= 1e-9)")
    assert ok


def test_criterion_10_y_identities(report):
    rng = np.random.default_rng(SEED + 10)
    worst_b = worst_c = worst_paths = 0.0
    for _ in range(1000):
        p1, p2 = _ti_phase(rng), _ti_phase(rng)
        f1 = rng.uniform(0.05, 0.95)
        b_harm = 1 / (f1 / p1.b + (1 - f1) / p2.b)
        star = TIConductivity(rng.uniform(0.1, 10), b_harm, rng.uniform(-5, 5))
        try:
            y = y_tensor_ti(p1, p2, f1, star)
        except HallBoundsError:
            continue
        worst_b = max(worst_b, abs(y.b_Y))
        generic = _ti_phase(rng)
        try:
            yg = y_tensor_ti(p1, p2, f1, generic)
        except HallBoundsError:
            continue
        m = y_tensor_matrix(p1.matrix(), p2.matrix(), f1, generic.matrix())
        worst_paths = max(worst_paths, np.abs(m - yg.matrix()).max() / max(1.0, np.abs(m).max()))
        c = rng.uniform(-5, 5)
        q1, q2 = TIConductivity(p1.a, p1.b, c), TIConductivity(p2.a, p2.b, c)
        try:
            yc = y_tensor_ti(q1, q2, f1, TIConductivity(star.a, rng.uniform(0.1, 10), c))
        except HallBoundsError:
            continue
        worst_c = max(worst_c, abs(yc.c_Y + c))
    ok = worst_b <= 1e-12 and worst_c <= 1e-12 and worst_paths <= 1e-12
    report(10, ok, f"|b_Y| at harmonic b* {worst_b:.1e}, |c_Y + c| {worst_c:.1e}, "
                   f"scalar vs matrix {worst_paths:.1e} (all <= 1e-12)")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
