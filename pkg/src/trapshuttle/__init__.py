"""Minimum-time shuttling of a harmonically trapped particle.

The trap may move no faster than a speed bound V; the task is to displace
it (and the particle) by d without leaving any vibrational excitation
behind.  This package synthesizes the provably fastest alternating bang
plan in closed form plus one scalar root-solve, and verifies it against
independent classical (RK4, brute-force search) and quantum (split-step
Schrodinger fidelity) oracles.
"""

from .model import (
    ORIGIN,
    ControlSegment,
    InvalidParameterError,
    PhysicalParams,
    Schedule,
    State,
    TrajectorySample,
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
from .synthesis import (
    BANG_EPS,
    NotExtremalError,
    SwitchingFit,
    SynthesisResult,
    bisect_root,
    branch_index,
    build_schedule,
    f_rho,
    fit_switching_function,
    limit_curve,
    minimum_time,
    solve_tau,
    sweep,
)
from .verification import (
    BruteForceReport,
    InfeasibleAtResolutionError,
    IntegratorConfig,
    brute_force_min_time,
    endpoint_residual,
    integrate_ode,
)
from .quantum import (
    GridBoundaryError,
    GridResolutionError,
    GridSpec,
    TransportCheckReport,
    WaveState,
    default_grid,
    eigenstate,
    evolve,
    overlap,
    predicted_phase,
    transport_check,
    trap_path,
    wrap_angle,
    write_density_csv,
)

__version__ = "0.1.0"
