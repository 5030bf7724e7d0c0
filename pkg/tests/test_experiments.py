import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from dilatesim import dilation
from dilatesim import experiments as ex

K1 = ex.constant(1.0)
THETA3 = 2 / 7
T_SCALAR = 0.9 / (8 * math.e) / THETA3  # theta K_max T = 0.9 / (8e)
SX = np.array([[0, 1], [1, 0]])
SZ = np.diag([1.0, -1.0])
# roundoff floor of dense propagation; the mismatch bound drops below it for M >= 128
ROUNDOFF = 1e-12


def quiet(fn, *a, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*a, **kw)


# -- problem validation ---------------------------------------------------------------


def test_problem_spec_validation():
    with pytest.raises(ValueError):
        ex.ProblemSpec(SX * 1j, -np.eye(2), [1, 0], 1.0)
    with pytest.raises(ValueError):
        ex.ProblemSpec(SZ, np.eye(2), [1, 0], 1.0)
    with pytest.raises(ValueError):
        ex.ProblemSpec(SZ, -np.eye(2), [1, 1], 1.0)
    with pytest.raises(ValueError):
        ex.ProblemSpec(SZ, -np.eye(3), [1, 0], 1.0)
    with pytest.raises(ValueError):
        ex.ProblemSpec(SZ, -np.eye(2), [1, 0], 1.0, ex.linear(1, -2))
    spec = ex.ProblemSpec(SZ, -0.5 * np.eye(2), [1, 0], 1.0, ex.linear(1, 1))
    assert spec.N == 2 and spec.K_max == pytest.approx(1.0)


# -- ideal and discrete profiles ------------------------------------------------------


def test_ideal_profile_cases():
    assert ex.ideal_profile(3, ex.constant(0.0), 1.0)[0] == 1.0
    assert ex.ideal_profile(3, K1, 1.0)[0] == pytest.approx(math.exp(-1), rel=1e-12)
    y, u = ex.ideal_profile(3, ex.linear(1, 1), 1.0)
    assert y == pytest.approx(math.exp(-1.5), rel=1e-12)
    assert u(0.5) == pytest.approx(y / 8)


def test_ideal_profile_negative_kappa():
    with pytest.raises(ValueError):
        ex.ideal_profile(3, ex.linear(0.1, -1), 1.0)


def test_discrete_profile_zero_kappa():
    g = dilation.profile(3, 16)
    assert np.allclose(ex.discrete_profile(3, 16, ex.constant(0.0), 1.0), g, atol=1e-15)


@pytest.mark.parametrize("kappa", [K1, ex.linear(0.5, 3.0)])
def test_discrete_profile_norm_conserved(kappa):
    g = dilation.profile(3, 32)
    ud = ex.discrete_profile(3, 32, kappa, 0.3)
    assert abs(np.linalg.norm(ud) - np.linalg.norm(g)) <= 1e-10


def test_discrete_profile_mid_vs_ideal():
    M, T = 64, 0.1
    ud = ex.discrete_profile(3, M, K1, T)
    y, u = ex.ideal_profile(3, K1, T)
    x = M // 2
    bound = quiet(ex.theorem_bound, ex.BoundInputs(3, M, T, 1.0))
    assert (M / x) ** 3 * abs(ud[x] - u(x / M)) <= bound


def test_boundary_forced_zero_kappa():
    g = dilation.profile(3, 16)
    assert np.allclose(ex.boundary_forced_profile(3, 16, ex.constant(0.0), 1.0), g, atol=1e-15)


def test_boundary_forced_against_ode_solver():
    M, T = 128, 0.1
    F = dilation.build_fh(M).real

    def rhs(t, z):
        y = z[M]
        return np.concatenate([-THETA3 * (F[:M, :M] @ z[:M] + y * F[:M, M]), [-y]])

    sol = solve_ivp(rhs, (0, T), dilation.profile(3, M), method="DOP853", rtol=1e-13, atol=1e-15)
    ue = ex.boundary_forced_profile(3, M, K1, T)
    assert np.abs(ue - sol.y[:, -1]).max() <= 1e-8
    assert ue[M] == pytest.approx(math.exp(-T), rel=1e-12)


@pytest.mark.parametrize("M", [32, 64, 128, 256])
def test_boundary_forced_vs_ideal_rate(M):
    T = 0.1
    ue = ex.boundary_forced_profile(3, M, K1, T)
    y, u = ex.ideal_profile(3, K1, T)
    e = np.abs(ue - u(np.arange(M + 1) / M))
    assert e.max() <= dilation.c_theta(3) * M**-1.5


@pytest.mark.parametrize("M", [16, 32, 64, 128, 256])
def test_boundary_mismatch_decay(M):
    ue = ex.boundary_forced_profile(3, M, K1, T_SCALAR)
    ud = ex.discrete_profile(3, M, K1, T_SCALAR)
    bound = ex.mismatch_bound(ex.BoundInputs(3, M, T_SCALAR, 1.0))
    assert np.abs(ue - ud)[: 3 * M // 4 + 1].max() <= bound + ROUNDOFF


@pytest.mark.parametrize("M", [32, 128])
def test_triangle_decomposition(M):
    ue = ex.boundary_forced_profile(3, M, K1, T_SCALAR)
    ud = ex.discrete_profile(3, M, K1, T_SCALAR)
    u = ex.ideal_profile(3, K1, T_SCALAR)[1](np.arange(M + 1) / M)
    assert np.all(np.abs(u - ud) <= np.abs(u - ue) + np.abs(ue - ud) + 1e-15)


# -- bound ----------------------------------------------------------------------------


def test_c_theta_value():
    assert ex.BoundInputs(3, 64, 0.1, 1.0).C_theta == pytest.approx(5 / 7, rel=1e-15)


def test_bound_formula_by_hand():
    b = ex.BoundInputs(3, 64, 0.1, 1.0)
    C, h, M = 5 / 7, 1 / 64, 64
    ref = 4**3 * (C * h**1.5 + (2 + M * (1 + C * h**1.5) / (8 * math.e)) * 2 ** (-M / 4))
    assert ex.theorem_bound(b) == pytest.approx(ref, rel=1e-14)


def test_bound_monotone_and_rate():
    Ms = [32, 64, 128, 256, 512, 1024, 2048]
    vals = [ex.theorem_bound(ex.BoundInputs(3, M, 0.01, 1.0)) for M in Ms]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] / vals[-2] == pytest.approx(2**-1.5, rel=1e-6)


def test_bound_hypotheses():
    assert ex.BoundInputs(3, 64, T_SCALAR, 1.0).hypothesis_violations() == []
    msgs = ex.BoundInputs(2, 64, 10.0, 1.0).hypothesis_violations()
    assert len(msgs) == 3
    with pytest.warns(UserWarning, match="hypothesis"):
        ex.theorem_bound(ex.BoundInputs(3, 64, 10.0, 1.0))


# -- end to end ----------------------------------------------------------------------


@pytest.mark.parametrize("M", [7, 15, 16, 64])
def test_unitary_limit(M):
    spec = ex.ProblemSpec(SZ, np.zeros((2, 2)), np.array([1, 1]) / math.sqrt(2), 1.3)
    run = ex.end_to_end(spec, 3, M)
    assert max(run.errors.values()) <= 1e-10


def test_scalar_decay_within_bound():
    spec = ex.scalar_problem(T_SCALAR)
    run = ex.end_to_end(spec, 3, 64)
    assert abs(run.truth[0] - math.exp(-T_SCALAR)) <= 1e-12
    bound = ex.theorem_bound(ex.BoundInputs(3, 64, T_SCALAR, 1.0))
    assert max(run.errors.values()) <= bound


def test_scalar_end_to_end_equals_ancilla_profile():
    # with N = 1 the dilated run is the ancilla evolution read out by l_h
    M = 32
    spec = ex.scalar_problem(T_SCALAR)
    run = ex.end_to_end(spec, 3, M)
    ud = ex.discrete_profile(3, M, K1, T_SCALAR)
    tr = quiet(dilation.build_triple, 3, M)
    for x, err in run.errors.items():
        approx = tr.C * (M / x) ** 3 * ud[x] / tr.C
        assert err == pytest.approx(abs(approx - math.exp(-T_SCALAR)), rel=1e-9, abs=1e-14)


def test_two_level_example_within_bound():
    spec = ex.ProblemSpec(SZ, -(np.eye(2) + SX) / 2 * 0.5, np.array([1, 0]), 0.5)
    with pytest.warns(UserWarning, match="hypothesis"):
        run = ex.end_to_end(spec, 3, 64)
    bound = quiet(ex.theorem_bound, ex.BoundInputs(3, 64, 0.5, spec.K_max))
    assert run.error <= bound


def test_end_to_end_errors():
    spec = ex.scalar_problem(0.05)
    with pytest.raises(ValueError):
        ex.end_to_end(spec, 3, 64, x=10)
    big = ex.ProblemSpec(np.zeros((4, 4)), -np.eye(4), np.eye(4)[0], 0.05)
    with pytest.raises(ValueError):
        ex.end_to_end(big, 3, 1024)


def test_steps_doubling_no_change():
    spec = ex.scalar_problem(0.1, ex.linear(1, 1))
    base = ex.end_to_end(spec, 3, 64)
    steps = 2 * ex.default_steps(0.1, THETA3, spec.K_max, 64, 0.0)
    fine = ex.end_to_end(spec, 3, 64, steps=steps)
    assert abs(base.error - fine.error) <= 0.01 * base.error


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))
def test_truth_energy_monotone(T, kscale, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    H = (a + a.conj().T) / 2
    b = rng.normal(size=(2, 2))
    K = -kscale * b @ b.T
    x0 = rng.normal(size=2) + 1j * rng.normal(size=2)
    spec = ex.ProblemSpec(H, K, x0 / np.linalg.norm(x0), T, ex.linear(1, 0.5))
    assert np.linalg.norm(ex.truth(spec, 64)) <= 1 + 1e-10


def test_mid_index_envelope():
    # rescaled error obeys the (M/x)^beta <= 4^beta envelope for every mid index
    M = 64
    spec = ex.scalar_problem(T_SCALAR)
    run = ex.end_to_end(spec, 3, M)
    ud = ex.discrete_profile(3, M, K1, T_SCALAR)
    u = ex.ideal_profile(3, K1, T_SCALAR)[1]
    for x, err in run.errors.items():
        raw = abs(ud[x] - u(x / M))
        assert err == pytest.approx((M / x) ** 3 * raw, rel=1e-8, abs=1e-15)
        assert err <= 4**3 * raw * (1 + 1e-8)


# -- sweep ----------------------------------------------------------------------------


def test_scaling_sweep_rows():
    spec = ex.scalar_problem(T_SCALAR)
    rows = ex.scaling_sweep(spec, 3, [16, 32, 64])
    assert [r.M for r in rows] == [16, 32, 64]
    assert math.isnan(rows[0].slope_estimate)
    assert all(r.measured_error <= r.bound_value for r in rows)
    assert rows[-1].slope_estimate == pytest.approx(
        ex.loglog_slope([16, 32, 64], [r.measured_error for r in rows])
    )


def test_scaling_sweep_validation():
    spec = ex.scalar_problem(T_SCALAR)
    with pytest.raises(ValueError):
        ex.scaling_sweep(spec, 3, [64, 32])
    with pytest.raises(ValueError):
        ex.scaling_sweep(spec, 3, [24, 48])


def test_loglog_slope():
    Ms = [8, 16, 32]
    assert ex.loglog_slope(Ms, [m**-1.5 for m in Ms]) == pytest.approx(-1.5)


def test_observed_order_is_two_with_independent_solver():
    # the mid-index error falls like h^2, faster than the proven h^{3/2}
    errs = []
    for M in (64, 128):
        F = dilation.build_fh(M).real
        sol = solve_ivp(lambda t, z: -THETA3 * (F @ z), (0, T_SCALAR), dilation.profile(3, M),
                        method="DOP853", rtol=1e-13, atol=1e-16)
        x = M // 2
        errs.append((M / x) ** 3 * abs(sol.y[x, -1] - math.exp(-T_SCALAR) / 8))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.02)
