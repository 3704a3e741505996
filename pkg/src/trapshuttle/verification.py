"""Independent oracles for the closed-form transport machinery.

Three checks that deliberately avoid the rotation closed form:

* a fixed-step RK4 integration of the raw linear ODE, with steps aligned
  to segment boundaries so no step straddles a control switch;
* endpoint residuals straight from the terminal conditions, one complex
  combination for the oscillator rest condition and one linear sum for the
  trap position;
* a brute-force minimum-time search over alternating bang schedules that
  scans duration space, polishes candidates onto the feasible set, and
  reports the fastest feasible plan per switching count.

For a linear system the classic RK4 step is the degree-4 Taylor expansion
of the exact propagator, so a whole constant-control segment is composed
by binary powers of one affine step map.  That keeps the 1e-4-step oracle
fast while computing the same quantity as literal stepping (differences
are at float-rounding level).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import Schedule, State
from .synthesis import BANG_EPS

A_MATRIX = np.array([[0.0, 1.0, 0.0],
                     [-1.0, 0.0, 1.0],
                     [0.0, 0.0, 0.0]])
B_VECTOR = np.array([0.0, 0.0, 1.0])


class InfeasibleAtResolutionError(RuntimeError):
    """The brute-force scan found no feasible schedule at its resolution."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings; the final partial step of a segment is shortened."""

    step: float = 1e-4
    method: str = "rk4-fixed-step"

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0):
            raise ValueError(f"step must be finite and positive, got {self.step!r}")


def _rk4_step_matrix(h: float, u: float) -> np.ndarray:
    """Affine RK4 step map on (x, 1): degree-4 Taylor of the exact propagator."""
    m = np.eye(3)
    term = np.eye(3)
    for k in range(1, 5):
        term = term @ (h * A_MATRIX) / k
        m = m + term
    # integral weights for the constant drive: h*(I + hA/2 + h^2A^2/6 + h^3A^3/24) b
    drive = np.eye(3) * h
    term = np.eye(3) * h
    for k in range(2, 5):
        term = term @ (h * A_MATRIX) / k
        drive = drive + term
    step = np.eye(4)
    step[:3, :3] = m
    step[:3, 3] = drive @ (B_VECTOR * u)
    return step


def integrate_ode(schedule: Schedule, config: IntegratorConfig | None = None) -> State:
    """RK4 endpoint of the schedule from the origin, segment-aligned steps."""
    if config is None:
        config = IntegratorConfig()
    h = config.step
    z = np.array([0.0, 0.0, 0.0, 1.0])
    for u, tau in zip(schedule.controls(), schedule.durations):
        n_full = int(tau // h)
        if n_full > 0:
            z = np.linalg.matrix_power(_rk4_step_matrix(h, u), n_full) @ z
        rem = tau - n_full * h
        if rem > 0.0:
            z = _rk4_step_matrix(rem, u) @ z
    return State(z[0], z[1], z[2])


def endpoint_residual(schedule: Schedule, gamma: float) -> tuple[float, float]:
    """Terminal-condition residuals (r_complex, r_x3) for an odd-length plan.

    r_complex = |-e^{iT} + 2*sum_j (-1)**(j-1) e^{i(T - t_j)} + 1| measures
    the oscillator rest condition (it equals |x2 + i*(x1 - x3)| at T);
    r_x3 = |alternating duration sum - gamma| measures the trap position.
    """
    n = schedule.n_segments
    if n % 2 == 0:
        raise ValueError(
            "endpoint residual is defined for an odd segment count; "
            "even-count plans cannot satisfy the rest condition"
        )
    if schedule.initial_sign != 1:
        raise ValueError("endpoint residual expects an initial_sign of +1")
    t_final = schedule.total_time()
    z = -complex(math.cos(t_final), math.sin(t_final)) + 1.0
    sign = 1.0
    for t_j in schedule.switch_times():
        dt = t_final - t_j
        z += 2.0 * sign * complex(math.cos(dt), math.sin(dt))
        sign = -sign
    return abs(z), abs(schedule.signed_sum() - gamma)


@dataclass
class BruteForceReport:
    """Outcome of the exhaustive schedule search for one displacement."""

    gamma: float
    best_time: float
    best_schedule: Schedule
    n_switchings_searched: int
    grid_resolution: float
    best_time_by_count: dict[int, float | None] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "best_time": self.best_time,
            "best_schedule": {
                "initial_sign": self.best_schedule.initial_sign,
                "durations": list(self.best_schedule.durations),
            },
            "n_switchings_searched": self.n_switchings_searched,
            "grid_resolution": self.grid_resolution,
            "best_time_by_count": {str(k): v for k, v in self.best_time_by_count.items()},
        }


def _batch_endpoint_residual(durations: np.ndarray, gamma: float) -> np.ndarray:
    """Euclidean endpoint error vs (gamma, 0, gamma) for rows of durations.

    Rows are alternating plans starting with u = +1; uses the explicit trig
    sums, vectorized over candidates.
    """
    t = np.cumsum(durations, axis=1)
    t_final = t[:, -1]
    m = durations.shape[1]
    signs = np.where(np.arange(m) % 2 == 0, 1.0, -1.0)
    x3 = durations @ signs
    arg = t_final[:, None] - t[:, :-1]
    sw_signs = signs[: m - 1]
    s_sum = -np.sin(t_final) + 2.0 * (np.sin(arg) @ sw_signs)
    c_sum = -np.cos(t_final) + 2.0 * (np.cos(arg) @ sw_signs)
    x1 = s_sum + x3
    x2 = c_sum + (1.0 if m % 2 == 1 else -1.0)
    return np.sqrt((x1 - gamma) ** 2 + x2**2 + (x3 - gamma) ** 2)


def _eliminated_tail(free: np.ndarray, gamma: float) -> np.ndarray:
    """Last duration from the linear trap-position constraint."""
    m_free = free.shape[1]
    signs = np.where(np.arange(m_free) % 2 == 0, 1.0, -1.0)
    partial = free @ signs
    if m_free % 2 == 0:  # last slot has coefficient +1
        return gamma - partial
    return partial - gamma


def _assemble(free: np.ndarray, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Stack free durations with the eliminated tail; mask invalid rows."""
    tail = _eliminated_tail(free, gamma)
    rows = np.hstack([free, tail[:, None]])
    valid = tail > 1e-9
    return rows, valid


def _refine(free: np.ndarray, gamma: float, h0: float, t_cap: float,
            rounds: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Pattern-search descent of the endpoint residual over the free durations.

    Coordinate probes with a per-candidate shrinking step; the eliminated
    tail keeps the trap constraint exact throughout.  Returns refined free
    coordinates and their residuals.
    """
    free = free.copy()
    rows, valid = _assemble(free, gamma)
    res = np.where(valid, _batch_endpoint_residual(rows, gamma), np.inf)
    h = np.full(len(free), h0)
    n_free = free.shape[1]
    for _ in range(rounds):
        improved = np.zeros(len(free), dtype=bool)
        for c in range(n_free):
            for sign in (1.0, -1.0):
                trial = free.copy()
                trial[:, c] = trial[:, c] + sign * h
                ok = trial[:, c] > 1e-9
                rows, valid = _assemble(trial, gamma)
                trial_res = np.where(
                    ok & valid & (rows.sum(axis=1) <= t_cap),
                    _batch_endpoint_residual(rows, gamma),
                    np.inf,
                )
                better = trial_res < res
                free[better] = trial[better]
                res[better] = trial_res[better]
                improved |= better
        h[~improved] *= 0.5
        if (h < 1e-10).all():
            break
    return free, res


def _scan_count(gamma: float, n_switch: int, coarse_step: float, t_cap: float,
                budget: int, feas_tol: float,
                keep: int = 600) -> tuple[float, np.ndarray, float] | None:
    """Best feasible plan with exactly n_switch switchings, or None.

    Grid-scans the free durations (the last one is eliminated by the trap
    constraint), polishes the lowest-residual candidates onto the feasible
    set, then zooms around the fastest feasible plan to sharpen it.
    """
    m = n_switch + 1
    n_free = m - 1
    keep = keep if n_free <= 2 else keep // 2

    if n_free == 0:
        # single segment: scan its duration directly
        d = np.arange(coarse_step, t_cap, coarse_step)
        rows = d[:, None]
        res = _batch_endpoint_residual(rows, gamma)
        order = np.argsort(res)[: min(keep, len(res))]
        cand = rows[order]
        refined, refined_res = _refine_full(cand, gamma, coarse_step, t_cap)
        feasible = refined_res < feas_tol
        if not feasible.any():
            return None
        totals = refined.sum(axis=1)
        totals[~feasible] = np.inf
        best = int(np.argmin(totals))
        return totals[best], refined[best], coarse_step

    points = int(t_cap / coarse_step)
    step = coarse_step
    if points**n_free > budget:
        points = max(int(budget ** (1.0 / n_free)), 3)
        step = t_cap / points
    grid = (np.arange(points) + 1.0) * step

    best_rows = None
    best_res = None
    block = max(1, int(2_000_000 // max(n_free, 1)))
    total_cells = points**n_free
    for start in range(0, total_cells, block):
        idx = np.arange(start, min(start + block, total_cells))
        free = np.empty((len(idx), n_free))
        rem = idx
        for c in range(n_free - 1, -1, -1):
            free[:, c] = grid[rem % points]
            rem = rem // points
        rows, valid = _assemble(free, gamma)
        valid &= rows.sum(axis=1) <= t_cap
        if not valid.any():
            continue
        free = free[valid]
        rows = rows[valid]
        res = _batch_endpoint_residual(rows, gamma)
        order = np.argsort(res)[: min(keep, len(res))]
        chunk_rows = free[order]
        chunk_res = res[order]
        if best_rows is None:
            best_rows, best_res = chunk_rows, chunk_res
        else:
            best_rows = np.vstack([best_rows, chunk_rows])
            best_res = np.concatenate([best_res, chunk_res])
            order = np.argsort(best_res)[:keep]
            best_rows = best_rows[order]
            best_res = best_res[order]
    if best_rows is None or len(best_rows) == 0:
        return None

    refined, refined_res = _refine(best_rows, gamma, step, t_cap)
    feasible = refined_res < feas_tol
    if not feasible.any():
        return None
    rows, _ = _assemble(refined, gamma)
    totals = rows.sum(axis=1)
    totals[~feasible] = np.inf
    best_i = int(np.argmin(totals))
    best_free = refined[best_i]
    best_total = totals[best_i]

    # zoom: re-scan a shrinking box around the current best feasible plan,
    # pre-screening the box mesh so only the most promising points get polished
    h = step
    per_axis = 7 if n_free <= 3 else 5
    while h > 2.5e-3:
        h /= 4.0
        axes = [np.maximum(best_free[c] + np.linspace(-3.0 * h, 3.0 * h, per_axis), 1e-9)
                for c in range(n_free)]
        mesh = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
        rows, valid = _assemble(mesh, gamma)
        screen = np.where(valid, _batch_endpoint_residual(rows, gamma), np.inf)
        mesh = mesh[np.argsort(screen)[:200]]
        refined, refined_res = _refine(mesh, gamma, h, t_cap, rounds=50)
        feasible = refined_res < feas_tol
        if not feasible.any():
            continue
        rows, _ = _assemble(refined, gamma)
        totals = rows.sum(axis=1)
        totals[~feasible] = np.inf
        i = int(np.argmin(totals))
        if totals[i] < best_total:
            best_total = totals[i]
            best_free = refined[i]

    best_rows, _ = _assemble(best_free[None, :], gamma)
    return best_total, best_rows[0], step


def _refine_full(rows: np.ndarray, gamma: float, h0: float,
                 t_cap: float, rounds: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Pattern search over all durations (no elimination); single-segment case."""
    rows = rows.copy()
    res = _batch_endpoint_residual(rows, gamma)
    h = np.full(len(rows), h0)
    for _ in range(rounds):
        improved = np.zeros(len(rows), dtype=bool)
        for c in range(rows.shape[1]):
            for sign in (1.0, -1.0):
                trial = rows.copy()
                trial[:, c] = trial[:, c] + sign * h
                ok = (trial[:, c] > 1e-9) & (trial.sum(axis=1) <= t_cap)
                trial_res = np.where(ok, _batch_endpoint_residual(trial, gamma), np.inf)
                better = trial_res < res
                rows[better] = trial[better]
                res[better] = trial_res[better]
                improved |= better
        h[~improved] *= 0.5
        if (h < 1e-10).all():
            break
    return rows, res


def brute_force_min_time(gamma: float, max_switchings: int,
                         coarse_step: float = 0.01, *,
                         time_horizon: float | None = None,
                         budget: int = 6_000_000,
                         feas_tol: float = 1e-6) -> BruteForceReport:
    """Exhaustive search for the fastest alternating plan reaching the target.

    Enumerates switching counts 0..max_switchings for plans starting with
    u = +1 (for gamma > 0 the mirrored family has no feasible member; pass
    a negated gamma to explore it).  The search horizon defaults to the
    full-speed round-up time 2*pi*ceil(gamma/(2*pi)) plus a margin, a
    feasible-time upper bound that needs no synthesis machinery.
    """
    if not (math.isfinite(gamma) and gamma > 0):
        raise ValueError(f"gamma must be finite and positive, got {gamma!r}")
    if max_switchings < 0:
        raise ValueError("max_switchings must be >= 0")
    if time_horizon is None:
        time_horizon = 2.0 * math.pi * math.ceil(gamma / (2.0 * math.pi)) + 0.5

    best = None
    by_count: dict[int, float | None] = {}
    resolution = coarse_step
    for n_switch in range(max_switchings + 1):
        found = _scan_count(gamma, n_switch, coarse_step, time_horizon,
                            budget, feas_tol)
        if found is None:
            by_count[n_switch] = None
            continue
        total, durations, step = found
        by_count[n_switch] = float(total)
        if best is None or total < best[0]:
            best = (total, durations, n_switch, step)
    if best is None:
        raise InfeasibleAtResolutionError(
            f"no feasible schedule found for gamma={gamma!r} with up to "
            f"{max_switchings} switchings at step {coarse_step!r}"
        )
    total, durations, n_switch, step = best
    return BruteForceReport(
        gamma=gamma,
        best_time=float(total),
        best_schedule=Schedule(1, tuple(float(d) for d in durations)),
        n_switchings_searched=max_switchings,
        grid_resolution=step,
        best_time_by_count=by_count,
    )
