import numpy as np
import pytest

from hallbounds import (
    HallBoundsError,
    L0Params,
    TIConductivity,
    YTensorTI,
    gamma_avg_adaptive,
    gamma_avg_closed,
    gamma_avg_closed_inverse,
    gamma_avg_numeric,
    gamma_of_xi,
    gamma_relation_residual,
    g_fun,
    hs_bounds,
    hs_inequality_check,
    hs_matrix_ti_check,
    hs_matrix_verdicts,
    reference_l0,
    y_block_tensor,
)
from hallbounds.gamma_verify import gamma1_of_xi, graded_breakpoints


def random_l0(rng, d1_min=0.05):
    t1, t4, t5 = rng.uniform(0.2, 5, 3)
    t2 = rng.uniform(-2, 2)
    return L0Params(t1, t2, t2**2 / t1 + rng.uniform(d1_min, 3), t4, t5)


def unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def test_gamma1_examples(rng):
    G = gamma1_of_xi([0, 0, 1])
    assert np.array_equal(G, np.diag([1.0, 1, 0, 0, 0, 1]))
    for _ in range(20):
        G = gamma1_of_xi(unit(rng))
        assert np.abs(G @ G - G).max() < 1e-14
        assert np.trace(G) == pytest.approx(3.0, abs=1e-14)


def test_gamma_at_axis(rng):
    l0 = random_l0(rng)
    G = gamma_of_xi(l0, [0, 0, 1])
    want = np.diag([1 / l0.t1, 1 / l0.t1, 0, 0, 0, 1 / l0.t5])
    assert np.allclose(G, want, atol=1e-15)


def test_gamma_relations_and_symmetry(rng):
    for _ in range(300):
        l0 = random_l0(rng)
        xi = unit(rng)
        assert gamma_relation_residual(l0, xi, rng.normal(size=6)) <= 1e-12
        G = gamma_of_xi(l0, xi)
        assert np.abs(G - G.T).max() <= 1e-13


def test_gamma_rejects_non_unit():
    with pytest.raises(HallBoundsError, match="unit"):
        gamma_of_xi(L0Params(1, 0, 1, 1, 1), [1, 1, 0])


def test_l0_validation():
    with pytest.raises(HallBoundsError):
        L0Params(1, 2, 1, 1, 1)
    with pytest.raises(HallBoundsError):
        L0Params(-1, 0, 1, 1, 1)


def test_numeric_matches_closed(rng):
    for _ in range(20):
        l0 = random_l0(rng)
        num = gamma_avg_numeric(l0, 64)
        closed = gamma_avg_closed(l0).matrix()
        assert np.abs(num - closed).max() <= 1e-10 * max(1.0, np.abs(closed).max())


def test_numeric_phi_offset_invariant(rng):
    l0 = random_l0(rng)
    a = gamma_avg_numeric(l0, 64, phi_offset=0.0)
    b = gamma_avg_numeric(l0, 64, phi_offset=0.37)
    assert np.abs(a - b).max() <= 1e-12


def test_zero_t2_blocks(rng):
    l0 = L0Params(1.3, 0.0, 0.8, 0.6, 2.0)
    for G in (gamma_avg_numeric(l0, 32), gamma_avg_closed(l0).matrix()):
        assert not G[:3, 3:].any() and not G[3:, :3].any()
    inv = gamma_avg_closed_inverse(l0)
    assert inv[3, 3] == 0 and not inv[:3, 3:].any()


def test_trace_identity(rng):
    for _ in range(100):
        l0 = random_l0(rng)
        e = gamma_avg_closed(l0)
        assert abs(2 * e.q1 / l0.t1 + e.q2 / l0.t4 - 1) <= 1e-12


def test_closed_inverse_example():
    M = gamma_avg_closed_inverse(L0Params.limit(0.2, 0.4, 0.5, 1.0))
    assert M[0, 0] == pytest.approx(0.32752, abs=1e-5)
    assert M[0, 4] == pytest.approx(0.65504, abs=1e-5)
    assert M[3, 3] == pytest.approx(1.31009, abs=1e-5)
    assert M[5, 5] == 1.0


def test_adaptive_small_d1():
    for d1 in (1e-2, 1e-4, 1e-6, 1e-8):
        l0 = L0Params(2.0, 0.5, 0.125 + d1, 0.7, 1.3)
        avg, n = gamma_avg_adaptive(l0)
        closed = gamma_avg_closed(l0).matrix()
        assert np.abs(avg - closed).max() <= 1e-10 * np.abs(closed).max()
        assert graded_breakpoints(l0) is not None or d1 > 1e-3


def test_p2_converges_monotonically():
    t1, t2, t4, t5 = 2.0, 0.5, 0.7, 1.3
    gaps = []
    for d1 in 10.0 ** -np.arange(2, 9):
        e = gamma_avg_closed(L0Params(t1, t2, t2**2 / t1 + d1, t4, t5))
        gaps.append(abs(e.p2 - 1 / t5))
    assert np.all(np.diff(gaps) < 0) and gaps[-1] < 1e-3


def test_inverse_approaches_limit():
    t1, t2, t4, t5 = 2.0, 0.5, 0.7, 1.3
    limit = gamma_avg_closed_inverse(L0Params.limit(t1, t2, t4, t5))
    errs = [np.abs(np.linalg.inv(gamma_avg_closed(L0Params(t1, t2, t2**2 / t1 + d1, t4, t5)).matrix())
                   - limit).max() for d1 in (1e-4, 1e-6, 1e-8)]
    # square-root rate in d1
    assert errs[0] / errs[1] == pytest.approx(10, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(10, rel=0.05)


def test_equality_case(rng):
    l0 = L0Params.limit(1.5, 0.3, 0.8, 1.1)
    yt = gamma_avg_closed_inverse(l0) - l0.matrix()
    assert abs(hs_inequality_check(yt, l0).residual) < 1e-12
    assert not hs_inequality_check(yt - 1e-3 * np.eye(6), l0).satisfied


def test_worked_example_matrix_form():
    p1, p2 = TIConductivity(4, 2, 0), TIConductivity(1, 1, 0)
    r = hs_bounds(p1, p2, 0.5, TIConductivity(2, 4 / 3, 0))
    mv = hs_matrix_verdicts(r.y, r.coefficients, *r.phases)
    assert all(v.satisfied for v in mv) and r.satisfied


def test_ti_check_agrees_with_full_matrix(rng):
    for _ in range(100):
        p1 = TIConductivity(rng.uniform(0.1, 10), rng.uniform(5, 10), rng.uniform(-5, 5))
        p2 = TIConductivity(rng.uniform(0.1, 10), rng.uniform(0.1, 5), rng.uniform(-5, 5))
        star = TIConductivity(rng.uniform(0.1, 10), rng.uniform(0.1, 10), rng.uniform(-5, 5))
        try:
            r = hs_bounds(p1, p2, rng.uniform(0.1, 0.9), star)
        except HallBoundsError:
            continue
        l0 = reference_l0(r.coefficients, *r.phases, "+")
        full = hs_inequality_check(y_block_tensor(r.y), l0)
        ti = hs_matrix_ti_check(r.y, l0)
        assert full.satisfied == ti.satisfied


def test_y_block_tensor_needs_invertible():
    with pytest.raises(HallBoundsError):
        y_block_tensor(YTensorTI(0.0, 1.0, 1.0))
