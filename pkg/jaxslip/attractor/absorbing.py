import warnings
from typing import Optional, Tuple

import numpy as np

from jaxslip.constants.eigenvalue import capital_lambda
from jaxslip.core.scaling import forcing_norms
from jaxslip.internals.logging import logger
from jaxslip.internals.types import PhysicalParams, TrajectorySummary, AbsorbingBallReport, Forcing, Grid, FlowState
from jaxslip.solver.stepper import ChannelStepper

__all__ = [
    'absorbing_radius',
    'absorbing_ball_check',
    'crossing_time',
    'entry_time_bound',
    'burn_in'
]


def absorbing_radius(params: PhysicalParams, forcing_h_norm: float) -> float:
    """R = (Lambda / 2) ||(f, h)||_H."""
    if not forcing_h_norm >= 0.:
        raise ValueError(f"Expected forcing_h_norm >= 0, got {forcing_h_norm}.")
    return 0.5 * capital_lambda(params.alpha, params.beta, params.L) * float(forcing_h_norm)


def absorbing_ball_check(trajectory: TrajectorySummary, params: PhysicalParams, forcing: Forcing, grid: Grid,
                         delta: float = 0.1, forcing_h_norm: Optional[float] = None) -> AbsorbingBallReport:
    """
    Check that ||u(t)||_H enters the ball of radius (1 + delta) R, R = (Lambda/2) ||(f, h)||_H, and stays there, and
    that it does not grow while outside.

    Args:
        trajectory: observer series of a run with time-independent forcing
        params: nondimensional parameters
        forcing: the forcing of the run
        grid: the grid of the run
        delta: discretisation allowance
        forcing_h_norm: overrides the quadrature of ||(f, h)||_H

    Returns:
        AbsorbingBallReport; entry_time is inf when the ball was never entered, which is warned about
    """
    if forcing.time_dependent:
        raise ValueError("The absorbing ball check needs time-independent forcing.")
    if forcing_h_norm is None:
        forcing_h_norm = float(forcing_norms(forcing, params, grid)[0])
    r_theory = absorbing_radius(params, forcing_h_norm)
    level = (1. + delta) * r_theory
    h_norm = np.asarray(trajectory.norms.h_norm)
    times = np.asarray(trajectory.times)
    inside = np.nonzero(h_norm <= level)[0]
    entered = inside.size > 0
    if entered:
        entry = int(inside[0])
        entry_time = float(times[entry])
        violations = int(np.sum(h_norm[entry:] > level))
    else:
        entry_time = float('inf')
        violations = 0
        warnings.warn(f"Trajectory never entered the absorbing ball of radius {level:.4g} "
                      f"(final ||u||_H = {h_norm[-1] if h_norm.size else float('nan'):.4g}); the run may be too short.")
    outside = h_norm[:-1] > level
    growth = h_norm[1:] > h_norm[:-1] * (1. + 1e-12)
    monotonicity_violations = int(np.sum(outside & growth))
    logger.info(f"Absorbing ball R={r_theory:.4g}: entered={entered} at t={entry_time:.4g}, "
                f"violations={violations}, monotonicity violations={monotonicity_violations}.")
    return AbsorbingBallReport(r_theory=r_theory, delta=float(delta), entry_time=entry_time, entered=bool(entered),
                               violations=violations, monotonicity_violations=monotonicity_violations)


def crossing_time(params: PhysicalParams) -> float:
    """
    Time scale of the ball: R / ||(f, h)||_H = Lambda / 2, also the decay time of ||u||_H at zero forcing.
    """
    return 0.5 * capital_lambda(params.alpha, params.beta, params.L)


def entry_time_bound(params: PhysicalParams, h_norm0: float, forcing_h_norm: float, delta: float = 0.1) -> float:
    """
    Latest time at which a run starting at ||u0||_H = h_norm0 enters the ball of radius (1 + delta) R.

    ||u(t)||_H - R decays at least like exp(-t / tau), tau the crossing time, so entry happens by
    tau log((h_norm0 - R) / (delta R)); zero when the start is already inside.
    """
    if not delta > 0.:
        raise ValueError(f"Expected delta > 0, got {delta}.")
    r = absorbing_radius(params, forcing_h_norm)
    if h_norm0 <= (1. + delta) * r:
        return 0.
    if r == 0.:
        return float('inf')
    return crossing_time(params) * float(np.log((h_norm0 - r) / (delta * r)))


def burn_in(stepper: ChannelStepper, state: FlowState, max_time: float, delta: float = 0.1,
            crossings: int = 5, chunk_time: Optional[float] = None) -> Tuple[FlowState, float]:
    """
    Run until ||u||_H enters the ball of radius (1 + delta) R and then for `crossings` more crossing times, as a
    practical stand-in for reaching the attractor.

    Returns:
        (state after burn-in, entry time), the entry time being inf (with a warning) if max_time ran out first
    """
    params = stepper.params
    forcing_h_norm = float(forcing_norms(stepper.forcing, params, stepper.grid, t=state.t)[0])
    level = (1. + delta) * absorbing_radius(params, forcing_h_norm)
    tau = crossing_time(params)
    chunk_time = max(tau if chunk_time is None else chunk_time, stepper.cfg.dt)
    t_stop = float(state.t) + max_time
    while float(stepper.norms(state.field).h_norm) > level:
        if float(state.t) >= t_stop - 0.5 * stepper.cfg.dt:
            warnings.warn(f"Burn-in did not reach the absorbing ball within t={max_time}.")
            return state, float('inf')
        state = stepper.run_to_time(state, min(float(state.t) + chunk_time, t_stop), cadence=1).final_state
    entry_time = float(state.t)
    state = stepper.run_to_time(state, entry_time + crossings * tau).final_state
    return state, entry_time
