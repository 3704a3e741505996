"""Closed-form synthesis of minimum-time alternating bang schedules.

For a target displacement gamma > 0 the fastest admissible plan starts at
full speed (u = +1) and switches 2*rho times, where the branch index rho
is fixed by 2*(rho-1)*pi < gamma <= 2*rho*pi.  The whole plan is pinned by
a single scalar tau, the common duration of the first and last segments,
which solves a monotone transcendental equation on (0, pi):

    f(tau) = (2*tau + 2*(rho-1)*pi - gamma) / (2*rho - 1)
             - 2*atan(sin(tau) / (2*rho - cos(tau))) = 0

Interior segments then come in complementary pairs: the even-indexed ones
all equal the first fraction above, and consecutive interior pairs sum to
2*pi.  At gamma = 2*rho*pi no switching is needed; a single full-speed
segment of duration 2*rho*pi is optimal.

A plan is certified as an extremum candidate by fitting the sinusoidal
switching law Phi(t) = c - A*sin(t + theta): Phi must vanish at every
switching instant and carry the sign of the active control in between.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .model import Schedule, TWO_PI

BANG_EPS = 1e-9


class NotExtremalError(ValueError):
    """No sinusoidal switching law is consistent with the given schedule."""


def bisect_root(f: Callable[[float], float], lo: float, hi: float,
                max_iter: int = 200) -> float:
    """Bisection for a sign change of f on [lo, hi], run to float resolution.

    Guaranteed to converge for continuous f with f(lo)*f(hi) < 0; used for
    every scalar solve here because the bracketed functions are monotone.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ValueError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fhi > 0.0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def branch_index(gamma: float, eps: float = BANG_EPS) -> tuple[int, bool]:
    """Branch index rho with 2*(rho-1)*pi < gamma <= 2*rho*pi, plus bang flag.

    Within eps of a multiple of 2*pi the plan degenerates to the pure bang
    solution of that boundary, so such gammas snap to it from either side.
    """
    if not (math.isfinite(gamma) and gamma > 0.0):
        raise ValueError(f"gamma must be finite and positive, got {gamma!r}")
    nearest = round(gamma / TWO_PI)
    if nearest >= 1 and abs(gamma - nearest * TWO_PI) <= eps:
        return nearest, True
    return math.ceil(gamma / TWO_PI), False


def f_rho(tau: float, gamma: float, rho: int) -> float:
    """Residual of the boundary-duration equation; monotone on (0, 2*pi)."""
    return (2.0 * tau + 2.0 * (rho - 1) * math.pi - gamma) / (2 * rho - 1) \
        - 2.0 * math.atan(math.sin(tau) / (2 * rho - math.cos(tau)))


def solve_tau(gamma: float, rho: int) -> float:
    """Unique root of f_rho on (0, pi) for gamma strictly inside branch rho.

    The branch condition guarantees f_rho(0) < 0 < f_rho(pi), so bisection
    converges unconditionally; the bracket is driven to float resolution.
    """
    if not (2.0 * (rho - 1) * math.pi < gamma < 2.0 * rho * math.pi):
        raise ValueError(
            f"gamma={gamma!r} is not strictly inside branch rho={rho}; "
            "use the bang solution at the boundary"
        )
    return bisect_root(lambda t: f_rho(t, gamma, rho), 0.0, math.pi)


@dataclass(frozen=True)
class SynthesisResult:
    """Synthesized minimum-time plan for one displacement.

    gamma       dimensionless displacement
    rho         branch index
    tau         first/last segment duration (pi for the pure bang case)
    schedule    the alternating bang plan, initial sign +1
    total_time  minimum transfer time
    """

    gamma: float
    rho: int
    tau: float
    schedule: Schedule
    total_time: float

    @property
    def is_bang(self) -> bool:
        return self.schedule.n_segments == 1

    def to_json_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "rho": self.rho,
            "tau": self.tau,
            "initial_sign": self.schedule.initial_sign,
            "durations": list(self.schedule.durations),
            "total_time": self.total_time,
            "switch_times": list(self.schedule.switch_times()),
        }


def build_schedule(gamma: float, eps: float = BANG_EPS) -> SynthesisResult:
    """Minimum-time plan reaching (gamma, 0, gamma) from rest at the origin.

    Pure bang of duration 2*rho*pi when gamma sits on a branch boundary;
    otherwise 2*rho + 1 segments [tau, e, 2*pi - e, e, ..., e, tau] with
    e = (2*tau + 2*(rho-1)*pi - gamma) / (2*rho - 1).
    """
    rho, is_bang = branch_index(gamma, eps)
    if is_bang:
        t_total = rho * TWO_PI
        return SynthesisResult(gamma, rho, math.pi, Schedule(1, (t_total,)), t_total)
    tau = solve_tau(gamma, rho)
    even = (2.0 * tau + 2.0 * (rho - 1) * math.pi - gamma) / (2 * rho - 1)
    odd = TWO_PI - even
    durations = [tau]
    for k in range(rho):
        durations.append(even)
        durations.append(odd if k < rho - 1 else tau)
    t_total = (4.0 * rho * (tau + (rho - 1) * math.pi) - gamma) / (2 * rho - 1)
    return SynthesisResult(gamma, rho, tau, Schedule(1, tuple(durations)), t_total)


def minimum_time(gamma: float, eps: float = BANG_EPS) -> float:
    """Minimum transfer time T(gamma); equals 2*rho*pi exactly at boundaries."""
    return build_schedule(gamma, eps).total_time


def sweep(gamma_min: float, gamma_max: float, count: int,
          eps: float = BANG_EPS) -> list[SynthesisResult]:
    """Synthesis on a uniform gamma grid; rows snap to bang points per eps."""
    if not (math.isfinite(gamma_min) and math.isfinite(gamma_max)
            and 0.0 < gamma_min < gamma_max):
        raise ValueError(
            f"need 0 < gamma_min < gamma_max, got {gamma_min!r}, {gamma_max!r}"
        )
    if count < 2:
        raise ValueError(f"count must be >= 2, got {count!r}")
    step = (gamma_max - gamma_min) / (count - 1)
    results = []
    for i in range(count):
        g = gamma_max if i == count - 1 else gamma_min + i * step
        results.append(build_schedule(g, eps))
    return results


def limit_curve(gamma_bar: float) -> float:
    """Shifted transfer time in the many-switching limit.

    Solves tau - sin(tau) = gamma_bar / 2 on [0, pi] (the left side is
    strictly increasing there) and returns 2*tau.
    """
    if not (math.isfinite(gamma_bar) and 0.0 <= gamma_bar <= TWO_PI):
        raise ValueError(f"gamma_bar must lie in [0, 2*pi], got {gamma_bar!r}")
    if gamma_bar == 0.0:
        return 0.0
    half = 0.5 * gamma_bar

    def g(t: float) -> float:
        return t - math.sin(t) - half

    # sin(pi) rounds to ~1.2e-16, so the right bracket can sit a hair below
    # zero when gamma_bar is within one ulp of 2*pi
    if g(math.pi) <= 0.0:
        return TWO_PI
    return 2.0 * bisect_root(g, 0.0, math.pi)


@dataclass(frozen=True)
class SwitchingFit:
    """Sinusoidal switching law Phi(t) = c - amplitude*sin(t + theta).

    Normalized to amplitude 1 (only the zeros and signs of Phi matter);
    residual is the largest |Phi| over the schedule's switching instants.
    """

    c: float
    amplitude: float
    theta: float
    residual: float

    def phi(self, t: float) -> float:
        return self.c - self.amplitude * math.sin(t + self.theta)


def fit_switching_function(schedule: Schedule, tol: float = 1e-8) -> SwitchingFit:
    """Fit Phi(t) = c - sin(t + theta) consistent with the schedule's switches.

    The first two switch times fix theta and c up to a half-turn (the two
    crossings must have opposite slopes); the half-turn is chosen to match
    the first segment's control sign.  The fit is then checked in full:
    Phi must vanish at every switching instant within tol, keep the sign
    of the active control on every open segment, and place no further
    crossing strictly inside any segment.  Any violation raises
    NotExtremalError.
    """
    switches = schedule.switch_times()
    if len(switches) < 2:
        raise ValueError("schedule must have at least two switchings to fit")
    t1, t2 = switches[0], switches[1]
    theta = (0.5 * (math.pi - t1 - t2)) % TWO_PI
    c = math.sin(t1 + theta)

    controls = schedule.controls()
    first_mid = 0.5 * t1
    phi_first = c - math.sin(first_mid + theta)
    if phi_first == 0.0:
        raise NotExtremalError("switching law is degenerate on the first segment")
    if (phi_first > 0.0) != (controls[0] > 0):
        theta = (theta + math.pi) % TWO_PI
        c = -c

    residual = max(abs(c - math.sin(t_j + theta)) for t_j in switches)
    if residual > tol:
        raise NotExtremalError(
            f"switching law residual {residual:.3e} exceeds {tol:.1e}"
        )

    bounds = [0.0, *switches, schedule.total_time()]
    for j, u in enumerate(controls):
        mid = 0.5 * (bounds[j] + bounds[j + 1])
        phi_mid = c - math.sin(mid + theta)
        if phi_mid == 0.0 or (phi_mid > 0.0) != (u > 0):
            raise NotExtremalError(
                f"switching-law sign on segment {j + 1} contradicts its control"
            )

    # every zero crossing of Phi inside (0, T) must be a switching instant
    if abs(c) < 1.0:
        base = math.asin(c)
        t_final = bounds[-1]
        zeros = []
        for branch in (base, math.pi - base):
            k0 = math.floor((0.0 - (branch - theta)) / TWO_PI)
            for k in range(k0 - 1, k0 + int(t_final / TWO_PI) + 3):
                z = branch - theta + k * TWO_PI
                if 1e-9 < z < t_final - 1e-9:
                    zeros.append(z)
        for z in zeros:
            if min(abs(z - t_j) for t_j in switches) > 1e-6:
                raise NotExtremalError(
                    f"switching law crosses zero at t={z:.6f} with no switch there"
                )

    return SwitchingFit(c=c, amplitude=1.0, theta=theta, residual=residual)
