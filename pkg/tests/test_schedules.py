import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ringqaoa.optimize import closed_form_controllable
from ringqaoa.pseudospin import AngleSchedule, DomainError
from ringqaoa.schedules import (
    FAMILIES,
    ContinuousSchedule,
    angles_to_s,
    digitize,
    evaluate,
    optimize_family_parameter,
    s_profile,
    scaling_collapse,
    step_times,
)

families = st.one_of(
    st.just(ContinuousSchedule("linear")),
    st.floats(0.0, 100.0).map(lambda c: ContinuousSchedule("roland_cerf", c)),
    st.floats(0.05, 32.0).map(lambda c: ContinuousSchedule("power_law", c)),
)


@pytest.mark.parametrize("sched", [
    ContinuousSchedule("linear", total_time_tau=7.0),
    ContinuousSchedule("roland_cerf", 3.0, 7.0),
    ContinuousSchedule("roland_cerf", 0.2, 7.0),
    ContinuousSchedule("power_law", 2.5, 7.0),
])
def test_midpoint_is_half(sched):
    assert evaluate(sched, 3.5) == pytest.approx(0.5, abs=1e-15)


@given(families, st.floats(0.1, 1e4))
def test_endpoints_pinned(sched, tau):
    sched = ContinuousSchedule(sched.family, sched.parameter_C, tau)
    assert abs(evaluate(sched, 0.0)) < 1e-12
    assert abs(evaluate(sched, tau) - 1.0) < 1e-12


@given(families)
def test_monotone(sched):
    s = evaluate(sched, np.linspace(0, 1, 501))
    assert np.all(np.diff(s) >= -1e-15)


@given(families, st.floats(0.0, 0.5))
def test_symmetric_about_critical_point(sched, x):
    s = sched.of_fraction(np.array([0.5 - x, 0.5 + x]))
    assert s[0] + s[1] == pytest.approx(1.0, abs=1e-12)


def test_evaluate_rejects_out_of_range():
    with pytest.raises(DomainError):
        evaluate(ContinuousSchedule("linear", total_time_tau=2.0), 2.5)
    with pytest.raises(DomainError):
        evaluate(ContinuousSchedule("linear"), -0.1)


@pytest.mark.parametrize("kwargs", [
    dict(family="cubic"), dict(family="linear", total_time_tau=0.0),
    dict(family="roland_cerf", parameter_C=-1.0), dict(family="power_law", parameter_C=0.0),
])
def test_continuous_rejects(kwargs):
    with pytest.raises(DomainError):
        ContinuousSchedule(**kwargs)


def test_limits_reduce_to_linear():
    x = np.linspace(0, 1, 41)
    lin = ContinuousSchedule("linear").of_fraction(x)
    assert np.allclose(ContinuousSchedule("power_law", 1.0).of_fraction(x), lin, atol=1e-15)
    assert np.allclose(ContinuousSchedule("roland_cerf", 1e-6).of_fraction(x), lin, atol=1e-11)
    assert np.array_equal(ContinuousSchedule("roland_cerf", 0.0).of_fraction(x), lin)


def test_digitize_linear_example():
    d = digitize(ContinuousSchedule("linear", total_time_tau=2.0), 2, "right_endpoint", dt=1.0)
    assert np.allclose(d.s_values, [0.5, 1.0])
    assert np.allclose(d.angles.gamma, [0.5, 1.0])
    assert np.allclose(d.angles.beta, [0.5, 0.0])


def test_digitize_midpoint_and_default():
    d = digitize(ContinuousSchedule("linear", total_time_tau=4.0), 4, "midpoint")
    assert np.allclose(d.s_values, [0.125, 0.375, 0.625, 0.875])
    assert digitize(ContinuousSchedule("linear", total_time_tau=4.0), 4).s_values[-1] == 1.0


def test_digitize_rejects():
    sched = ContinuousSchedule("linear")
    with pytest.raises(DomainError):
        digitize(sched, 0)
    with pytest.raises(DomainError):
        digitize(sched, 4, "left")
    with pytest.raises(DomainError):
        digitize(sched, 4, dt=0.0)


@given(families, st.integers(1, 64), st.floats(0.1, 5.0))
def test_sum_rule(sched, P, dt):
    d = digitize(sched, P, dt=dt)
    assert d.tau == pytest.approx(P * dt, rel=1e-12)
    assert d.angles.total_time == pytest.approx(P * dt, rel=1e-12)
    assert np.allclose(d.angles.gamma, d.s_values * dt, atol=0)


@given(families, st.integers(1, 64), st.floats(0.1, 5.0), st.sampled_from(["midpoint", "right_endpoint"]))
def test_angles_to_s_round_trip(sched, P, dt, sampling):
    d = digitize(sched, P, sampling, dt=dt)
    if np.any(d.s_values == 0):
        return
    s, dts, tau = angles_to_s(d.angles)
    assert np.allclose(s, d.s_values, atol=1e-14, rtol=0)
    assert np.allclose(dts, d.dt_values, atol=1e-14, rtol=0)
    assert tau == pytest.approx(P * dt, rel=1e-14)


def test_angles_to_s_examples():
    s, _, _ = angles_to_s(AngleSchedule([0.3, 0.7], [0.3, 0.7]))
    assert np.allclose(s, 0.5)
    d = digitize(ContinuousSchedule("linear", total_time_tau=8.0), 8)
    s, dt, tau = angles_to_s(d.angles)
    assert np.max(np.abs(s - d.s_values)) < 1e-14 and np.max(np.abs(dt - 1)) < 1e-14 and tau == 8.0
    with pytest.raises(DomainError, match="m = \\[2\\]"):
        angles_to_s(AngleSchedule([0.3, 0.0], [0.3, 0.0]))


def test_closed_form_profile_is_mirror_symmetric():
    # s = 1/2 everywhere except the pi/8 steps, and s_m = 1 - s_{P+1-m}
    for P in (4, 5, 8):
        s, _, _ = angles_to_s(closed_form_controllable(2 * P, P))
        assert np.allclose(s + s[::-1], 1.0)
        assert np.all(np.min(np.abs(s[:, None] - [1 / 3, 0.5, 2 / 3]), axis=1) < 1e-15)


def test_roland_cerf_digitized_shape():
    d = digitize(ContinuousSchedule("roland_cerf", 10.0, 8.0), 8)
    s = d.s_values
    assert np.all(np.diff(s) > 0)
    steps = np.diff(s)
    # steep near the ends, flat across the middle
    assert steps[0] > 2 * steps[3] and steps[-1] > 2 * steps[3]


def test_step_times():
    dt = np.array([1.0, 2.0, 3.0])
    assert np.allclose(step_times(dt), [1, 3, 6])
    assert np.allclose(step_times(dt, "mid"), [0.5, 2, 4.5])
    with pytest.raises(DomainError):
        step_times(dt, "start")
    tau, t, s = s_profile(AngleSchedule([0.5, 1.0], [0.5, 0.0]))
    assert tau == 2.0 and np.allclose(t, [0.5, 1.5]) and np.allclose(s, [0.5, 1.0])


@given(st.floats(0.1, 3.0))
def test_collapse_identical_profiles(alpha):
    t = np.linspace(0, 1, 20)
    run = (1.0, t, 0.5 + 0.3 * np.sin(3 * t))
    assert scaling_collapse([run, run, run], alpha).distance == 0.0


def test_collapse_recovers_planted_exponent():
    runs = []
    for tau in (50.0, 100.0, 200.0, 400.0):
        t = (np.arange(int(tau)) + 0.5)
        runs.append((tau, t, 0.5 + tau**-1.25 * np.tanh(4 * (t / tau - 0.5))))
    alphas = np.arange(0.5, 2.01, 0.05)
    d = [scaling_collapse(runs, a).distance for a in alphas]
    assert alphas[int(np.argmin(d))] == pytest.approx(1.25, abs=1e-9)
    with pytest.raises(ValueError):
        scaling_collapse(runs[:1], 1.0)


def test_family_parameter_rejects_linear():
    with pytest.raises(DomainError):
        optimize_family_parameter("linear", 8.0, lambda s: 0.0)


def test_family_parameter_finds_planted_minimum():
    opt = optimize_family_parameter("power_law", 10.0, lambda s: (np.log(s.parameter_C) - np.log(3.0)) ** 2)
    assert opt.interior and opt.C == pytest.approx(3.0, rel=1e-3)
    edge = optimize_family_parameter("roland_cerf", 10.0, lambda s: s.parameter_C)
    assert not edge.interior and edge.C == pytest.approx(0.1)


def test_power_law_at_one_is_linear_dqa():
    from ringqaoa.dynamics import digitized_residual
    pl = digitize(ContinuousSchedule("power_law", 1.0, 16.0), 16, dt=1.0).angles
    lin = digitize(ContinuousSchedule("linear", 1.0, 16.0), 16, "midpoint", dt=1.0).angles
    assert digitized_residual(None, pl) == pytest.approx(digitized_residual(None, lin), abs=1e-15)


def test_families_constant():
    assert FAMILIES == ("linear", "roland_cerf", "power_law")
