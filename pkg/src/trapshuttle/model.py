"""Dimensionless model of speed-limited transport of a trapped oscillator.

Scaling positions by omega/V, velocities by 1/V, and time by omega turns
the moving-trap plant into a three-state linear system whose only input is
the normalized trap velocity u(t) in [-1, 1]:

    x1' = x2        scaled oscillator center
    x2' = x3 - x1   scaled oscillator velocity
    x3' = u         scaled trap position

Under constant u the offset y = (x1 - x3, x2 - u) rotates rigidly at unit
angular rate while x3 drifts at rate u, so propagation across a
constant-control span is a rotation plus a linear update, exact to
floating point with no integrator involved.  On the (x1, x2) plane each
such arc is a trochoid traced by a point attached to a unit circle rolling
on the x2 = 0 line.

Transport plans are alternating bang schedules: a sign for the first
segment plus a list of positive segment durations, with the control
flipping sign at every boundary.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple, Sequence, TextIO

TWO_PI = 2.0 * math.pi


class InvalidParameterError(ValueError):
    """A physical or numeric argument lies outside its admissible range."""


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame transport task; all fields strictly positive.

    omega     trap angular frequency [rad/s]
    mass      particle mass [kg]
    hbar      reduced Planck constant [J*s]
    distance  required trap displacement [m]
    vmax      maximum trap speed [m/s]
    """

    omega: float
    mass: float
    hbar: float
    distance: float
    vmax: float

    def __post_init__(self):
        for name in ("omega", "mass", "hbar", "distance", "vmax"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(
                    f"{name} must be finite and positive, got {value!r}"
                )


def gamma(params: PhysicalParams) -> float:
    """Dimensionless displacement omega*d/V; the one number fixing the plan."""
    value = params.omega * params.distance / params.vmax
    if not math.isfinite(value):
        raise InvalidParameterError("omega*distance/vmax is not finite")
    return value


def to_physical_time(params: PhysicalParams, t: float) -> float:
    """Convert a dimensionless time back to seconds (divide by omega)."""
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"time must be finite and >= 0, got {t!r}")
    return t / params.omega


@dataclass(frozen=True)
class State:
    """Scaled state (x1, x2, x3): oscillator center, its velocity, trap position."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        if not (
            math.isfinite(self.x1)
            and math.isfinite(self.x2)
            and math.isfinite(self.x3)
        ):
            raise InvalidParameterError(f"state components must be finite, got {self}")

    def astuple(self) -> tuple[float, float, float]:
        return (self.x1, self.x2, self.x3)


ORIGIN = State(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ControlSegment:
    """One constant-control span: u in {-1, +1} held for a positive duration."""

    u: int
    duration: float

    def __post_init__(self):
        if self.u not in (-1, 1):
            raise InvalidParameterError(f"control must be -1 or +1, got {self.u!r}")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise InvalidParameterError(
                f"duration must be finite and positive, got {self.duration!r}"
            )


@dataclass(frozen=True)
class Schedule:
    """Alternating bang plan: sign of the first segment plus its durations.

    Segment j (1-based) carries control initial_sign * (-1)**(j-1).  An
    empty duration list is the do-nothing plan.
    """

    initial_sign: int
    durations: tuple[float, ...]

    def __post_init__(self):
        if self.initial_sign not in (-1, 1):
            raise InvalidParameterError(
                f"initial_sign must be -1 or +1, got {self.initial_sign!r}"
            )
        object.__setattr__(self, "durations", tuple(float(d) for d in self.durations))
        for d in self.durations:
            if not (math.isfinite(d) and d > 0):
                raise InvalidParameterError(
                    f"every duration must be finite and positive, got {d!r}"
                )

    @property
    def n_segments(self) -> int:
        return len(self.durations)

    @property
    def n_switchings(self) -> int:
        return max(len(self.durations) - 1, 0)

    def controls(self) -> tuple[int, ...]:
        """Per-segment control values, alternating from initial_sign."""
        return tuple(
            self.initial_sign * (1 if j % 2 == 0 else -1)
            for j in range(len(self.durations))
        )

    def segments(self) -> tuple[ControlSegment, ...]:
        return tuple(
            ControlSegment(u, d) for u, d in zip(self.controls(), self.durations)
        )

    def total_time(self) -> float:
        return math.fsum(self.durations)

    def switch_times(self) -> tuple[float, ...]:
        """Interior switching instants t_1 < ... < t_{n-1} (excludes 0 and T)."""
        times = []
        acc = 0.0
        for d in self.durations[:-1]:
            acc += d
            times.append(acc)
        return tuple(times)

    def signed_sum(self) -> float:
        """Net trap displacement: the alternating duration sum, i.e. x3(T)."""
        acc = 0.0
        for u, d in zip(self.controls(), self.durations):
            acc += u * d
        return acc

    def negated(self) -> "Schedule":
        """The mirror plan; it drives the system to the opposite endpoint."""
        return Schedule(-self.initial_sign, self.durations)


def propagate_const(start: State, u: float, dt: float) -> State:
    """Advance the state by dt >= 0 under constant control u in {-1, +1}.

    Exact closed form: the rolling-circle offset y = (x1 - x3, x2 - u) is
    rotated clockwise by the elapsed angle while the trap drifts at rate u.
    """
    if u not in (-1, 1):
        raise InvalidParameterError(f"control must be -1 or +1, got {u!r}")
    if not (math.isfinite(dt) and dt >= 0.0):
        raise InvalidParameterError(f"dt must be finite and >= 0, got {dt!r}")
    if dt == 0.0:
        return start
    c = math.cos(dt)
    s = math.sin(dt)
    y1 = start.x1 - start.x3
    y2 = start.x2 - u
    ry1 = c * y1 + s * y2
    ry2 = -s * y1 + c * y2
    x3 = start.x3 + u * dt
    return State(ry1 + x3, ry2 + u, x3)


def propagate_schedule(schedule: Schedule) -> State:
    """Endpoint of the schedule started from the origin.

    Composes the per-segment closed form; the alternating trig sums of
    lemma_endpoint are kept as an independent cross-check path.
    """
    state = ORIGIN
    for u, d in zip(schedule.controls(), schedule.durations):
        state = propagate_const(state, u, d)
    return state


def lemma_endpoint(schedule: Schedule) -> State:
    """Endpoint via the explicit alternating trig sums (cross-check path).

    For a plan starting with u = +1 and switch times t_1..t_{n-1},

        x1 - x3 = -sin(T) + 2 * sum_j (-1)**(j-1) * sin(T - t_j)
        x2 - (-1)**(n-1) = -cos(T) + 2 * sum_j (-1)**(j-1) * cos(T - t_j)
        x3 = alternating duration sum

    and the mirrored plan lands on the negated endpoint.
    """
    n = schedule.n_segments
    if n == 0:
        return ORIGIN
    switches = schedule.switch_times()
    t_final = switches[-1] + schedule.durations[-1] if switches else schedule.durations[0]
    s_sum = -math.sin(t_final)
    c_sum = -math.cos(t_final)
    sign = 1.0
    for t_j in switches:
        s_sum += 2.0 * sign * math.sin(t_final - t_j)
        c_sum += 2.0 * sign * math.cos(t_final - t_j)
        sign = -sign
    x3 = 0.0
    flip = 1.0
    for d in schedule.durations:
        x3 += flip * d
        flip = -flip
    x1 = s_sum + x3
    x2 = c_sum + (1.0 if n % 2 == 1 else -1.0)
    k = float(schedule.initial_sign)
    return State(k * x1, k * x2, k * x3)


class TrajectorySample(NamedTuple):
    t: float
    state: State
    u: int


def sample_trajectory(schedule: Schedule, dt_sample: float) -> list[TrajectorySample]:
    """Sample the trajectory at t = 0, dt, 2dt, ... with T always included.

    Each sample is propagated in closed form from the start of its own
    segment, so switch instants and the endpoint carry no accumulated
    stepping error.  A sample landing exactly on a switch reports the
    control of the segment that begins there; the final sample reports the
    last segment's control.
    """
    if not (math.isfinite(dt_sample) and dt_sample > 0):
        raise ValueError(f"dt_sample must be finite and positive, got {dt_sample!r}")
    controls = schedule.controls()
    if not controls:
        return [TrajectorySample(0.0, ORIGIN, 0)]

    starts = [ORIGIN]
    for u, d in zip(controls, schedule.durations):
        starts.append(propagate_const(starts[-1], u, d))
    bounds = [0.0, *schedule.switch_times(),
              schedule.total_time()]
    t_final = bounds[-1]

    times = []
    k = 0
    tiny = 1e-12 * max(1.0, t_final)
    while k * dt_sample < t_final - tiny:
        times.append(k * dt_sample)
        k += 1
    times.append(t_final)

    samples = []
    n = len(controls)
    for t in times:
        j = min(max(bisect_right(bounds, t) - 1, 0), n - 1)
        state = propagate_const(starts[j], controls[j], t - bounds[j])
        samples.append(TrajectorySample(t, state, controls[j]))
    return samples


def write_trajectory_csv(samples: Sequence[TrajectorySample], fp: TextIO) -> None:
    """Write samples as CSV with header t,x1,x2,x3,u at full double precision."""
    fp.write("t,x1,x2,x3,u\n")
    for t, state, u in samples:
        fp.write(f"{t!r},{state.x1!r},{state.x2!r},{state.x3!r},{u}\n")


def schedule_to_json_dict(schedule: Schedule, gamma_value: float | None = None) -> dict:
    """JSON-ready form of a schedule; gamma defaults to the net displacement."""
    return {
        "initial_sign": schedule.initial_sign,
        "durations": list(schedule.durations),
        "gamma": schedule.signed_sum() if gamma_value is None else gamma_value,
        "total_time": schedule.total_time(),
    }


def schedule_from_json_dict(data: dict) -> Schedule:
    return Schedule(int(data["initial_sign"]), tuple(float(d) for d in data["durations"]))
