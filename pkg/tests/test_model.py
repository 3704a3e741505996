"""Model layer: scaling, exact propagation, trajectory sampling, serialization."""

import io
import json
import math

import pytest

from trapshuttle import (
    ORIGIN,
    InvalidParameterError,
    PhysicalParams,
    Schedule,
    State,
    gamma,
    lemma_endpoint,
    propagate_const,
    propagate_schedule,
    sample_trajectory,
    schedule_from_json_dict,
    schedule_to_json_dict,
    to_physical_time,
    write_trajectory_csv,
)
from conftest import random_schedules

PI = math.pi


def make_params(omega=1.0, d=PI, vmax=1.0):
    return PhysicalParams(omega=omega, mass=1.0, hbar=1.0, distance=d, vmax=vmax)


class TestScaling:
    def test_gamma_identity_scaling(self):
        assert gamma(make_params(1.0, PI, 1.0)) == PI

    def test_gamma_product(self):
        assert gamma(make_params(2.0, PI, 1.0)) == 2.0 * PI

    def test_gamma_rejects_negative_distance(self):
        with pytest.raises(InvalidParameterError):
            make_params(1.0, -1.0, 1.0)

    def test_all_fields_must_be_positive(self):
        for field in ("omega", "mass", "hbar", "distance", "vmax"):
            kwargs = dict(omega=1.0, mass=1.0, hbar=1.0, distance=1.0, vmax=1.0)
            kwargs[field] = 0.0
            with pytest.raises(InvalidParameterError):
                PhysicalParams(**kwargs)

    def test_physical_time(self):
        assert to_physical_time(make_params(omega=2.0), 2.0 * PI) == PI
        assert to_physical_time(make_params(omega=1.0), 0.0) == 0.0
        assert to_physical_time(make_params(omega=0.5), 1.0) == 2.0

    def test_physical_time_rejects_negative(self):
        with pytest.raises(ValueError):
            to_physical_time(make_params(), -1.0)


class TestPropagateConst:
    def test_full_speed_full_period_reaches_bang_point(self):
        end = propagate_const(ORIGIN, 1, 2.0 * PI)
        assert end.x1 == pytest.approx(2.0 * PI, abs=1e-14)
        assert end.x2 == pytest.approx(0.0, abs=1e-14)
        assert end.x3 == 2.0 * PI

    def test_zero_span_is_identity(self):
        start = State(0.3, -1.2, 2.5)
        assert propagate_const(start, -1, 0.0) == start

    def test_half_period_cycloid_point(self):
        # x1 = t - sin t, x2 = 1 - cos t along the first full-speed arc
        end = propagate_const(ORIGIN, 1, PI)
        assert end.x1 == pytest.approx(PI, abs=1e-14)
        assert end.x2 == pytest.approx(2.0, abs=1e-14)
        assert end.x3 == PI

    def test_rejects_bad_control_and_nonfinite(self):
        with pytest.raises(InvalidParameterError):
            propagate_const(ORIGIN, 0, 1.0)
        with pytest.raises(InvalidParameterError):
            propagate_const(ORIGIN, 1, float("nan"))
        with pytest.raises(InvalidParameterError):
            State(float("inf"), 0.0, 0.0)

    def test_radius_is_conserved_along_a_segment(self):
        # y1^2 + y2^2 stays fixed while the control is constant
        start = State(0.7, -0.4, 1.1)
        for u in (1, -1):
            r0 = (start.x1 - start.x3) ** 2 + (start.x2 - u) ** 2
            for frac in (0.1, 0.45, 0.8, 1.7, 5.0):
                st = propagate_const(start, u, frac)
                r = (st.x1 - st.x3) ** 2 + (st.x2 - u) ** 2
                assert abs(r - r0) < 1e-12


class TestPropagateSchedule:
    def test_bang_schedule(self):
        end = propagate_schedule(Schedule(1, (2.0 * PI,)))
        assert (end.x1, end.x3) == (2.0 * PI, 2.0 * PI)
        assert abs(end.x2) < 1e-14

    def test_empty_schedule_is_origin(self):
        assert propagate_schedule(Schedule(1, ())) == ORIGIN

    def test_rotation_composition_matches_explicit_sums(self):
        for sched in random_schedules(1000, seed=2024):
            a = propagate_schedule(sched)
            b = lemma_endpoint(sched)
            assert abs(a.x1 - b.x1) < 1e-10
            assert abs(a.x2 - b.x2) < 1e-10
            assert abs(a.x3 - b.x3) < 1e-10

    def test_sign_symmetry_is_bitwise(self):
        for sched in random_schedules(300, seed=7):
            plus = propagate_schedule(sched)
            minus = propagate_schedule(sched.negated())
            assert minus.x1 == -plus.x1
            assert minus.x2 == -plus.x2
            assert minus.x3 == -plus.x3

    def test_x3_equals_signed_sum_exactly(self):
        for sched in random_schedules(300, seed=8):
            assert propagate_schedule(sched).x3 == sched.signed_sum()

    def test_schedule_validation(self):
        with pytest.raises(InvalidParameterError):
            Schedule(2, (1.0,))
        with pytest.raises(InvalidParameterError):
            Schedule(1, (1.0, -0.5))
        with pytest.raises(InvalidParameterError):
            Schedule(1, (0.0,))


class TestSampleTrajectory:
    def test_cycloid_velocity_samples(self):
        samples = sample_trajectory(Schedule(1, (2.0 * PI,)), PI / 2.0)
        assert len(samples) == 5
        x2s = [s.state.x2 for s in samples]
        for got, want in zip(x2s, (0.0, 1.0, 2.0, 1.0, 0.0)):
            assert got == pytest.approx(want, abs=1e-12)
        assert samples[-1].t == 2.0 * PI

    def test_large_step_still_includes_endpoint(self):
        samples = sample_trajectory(Schedule(1, (1.0, 0.5)), 10.0)
        assert len(samples) == 2
        assert samples[0].t == 0.0
        assert samples[1].t == pytest.approx(1.5)

    def test_empty_schedule_single_sample(self):
        samples = sample_trajectory(Schedule(1, ()), 0.1)
        assert len(samples) == 1
        assert samples[0].state == ORIGIN

    def test_control_column_flips_at_switches(self):
        sched = Schedule(1, (1.0, 1.0, 1.0))
        samples = sample_trajectory(sched, 0.25)
        for s in samples:
            expected = 1 if (s.t < 1.0 or s.t >= 2.0) else -1
            assert s.u == expected

    def test_samples_agree_with_direct_propagation(self):
        sched = Schedule(-1, (0.9, 2.2, 1.4))
        for s in sample_trajectory(sched, 0.37):
            # re-propagate from scratch to time t
            state = ORIGIN
            remaining = s.t
            for u, d in zip(sched.controls(), sched.durations):
                step = min(remaining, d)
                state = propagate_const(state, u, step)
                remaining -= step
                if remaining <= 0:
                    break
            assert state.x1 == pytest.approx(s.state.x1, abs=1e-10)
            assert state.x2 == pytest.approx(s.state.x2, abs=1e-10)

    def test_three_arc_plan_traces_cycloid_trochoid_cycloid(self):
        # first/last arcs: unit rolling radius; middle arc: radius > 1
        from trapshuttle import build_schedule

        sched = build_schedule(PI).schedule
        tau = sched.durations[0]
        samples = sample_trajectory(sched, 0.01)
        bounds = sched.switch_times()
        for t, st, u in samples:
            r = math.hypot(st.x1 - st.x3, st.x2 - u)
            if t < bounds[0] or t > bounds[1]:
                assert r == pytest.approx(1.0, abs=1e-9)
            elif bounds[0] < t < bounds[1]:
                assert r == pytest.approx(math.sqrt(5.0 - 4.0 * math.cos(tau)), abs=1e-9)
                assert r > 1.0


class TestSerialization:
    def test_trajectory_csv_header_and_precision(self):
        samples = sample_trajectory(Schedule(1, (1.0,)), 0.5)
        buf = io.StringIO()
        write_trajectory_csv(samples, buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "t,x1,x2,x3,u"
        assert len(lines) == 1 + len(samples)
        t, x1, x2, x3, u = lines[2].split(",")
        assert float(t) == samples[1].t  # shortest round-trip repr

    def test_schedule_json_round_trip(self):
        sched = Schedule(-1, (1.25, 0.7520000000000001, 2.0))
        payload = schedule_to_json_dict(sched, gamma_value=-1.4)
        assert payload["initial_sign"] == -1
        assert payload["gamma"] == -1.4
        text = json.dumps(payload)
        back = schedule_from_json_dict(json.loads(text))
        assert back == sched
        assert json.dumps(schedule_to_json_dict(back, gamma_value=-1.4)) == text

    def test_schedule_json_default_gamma_is_net_displacement(self):
        sched = Schedule(1, (2.0, 0.5, 1.0))
        payload = schedule_to_json_dict(sched)
        assert payload["gamma"] == sched.signed_sum()
        assert payload["total_time"] == sched.total_time()
