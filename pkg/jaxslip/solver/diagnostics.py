from typing import Callable, Dict, Optional, Tuple

import jax
import numpy as np
from jax import numpy as jnp

from jaxslip.core.fields import compute_norms, divergence
from jaxslip.internals.cumulative_ops import cumulative_trapezoid
from jaxslip.internals.types import FlowState, Grid, PhysicalParams, TrajectorySummary, DifferenceEnergy, Forcing, \
    Laws, SolverConfig, Field, FloatArray
from jaxslip.solver.stepper import get_stepper

__all__ = [
    'divergence_residual',
    'difference_energy',
    'continuous_dependence_constant',
    'step',
    'run_to_time'
]


def divergence_residual(state, grid: Grid) -> FloatArray:
    """
    Max-norm of the discrete divergence of (u, v).
    """
    return jnp.max(jnp.abs(divergence(state, grid)))


def difference_energy(u_traj: TrajectorySummary, v_traj: TrajectorySummary, params: PhysicalParams,
                      grid: Grid) -> DifferenceEnergy:
    """
    Energy of the difference w = u - v of two runs: ||w(t)||_H^2 and the running integral int_0^t ||w||_V^2.

    Args:
        u_traj: run with stored snapshots
        v_traj: run with stored snapshots on the same grid and sample times
        params: supplies alpha and beta
        grid: the grid

    Returns:
        DifferenceEnergy at the common sample times

    Raises:
        ValueError: if snapshots are missing or the sample times differ.
    """
    if u_traj.snapshots is None or v_traj.snapshots is None:
        raise ValueError("Both trajectories need stored snapshots, run with store_snapshots=True.")
    times = np.asarray(u_traj.times)
    other_times = np.asarray(v_traj.times)
    if times.shape != other_times.shape or not np.allclose(times, other_times, rtol=0., atol=1e-12):
        raise ValueError(f"Mismatched timestamps: {times.shape[0]} samples vs {other_times.shape[0]} samples.")
    w = jax.tree.map(jnp.subtract, u_traj.snapshots.field, v_traj.snapshots.field)

    def energies(field: Field):
        norms = compute_norms(field, params, grid)
        return norms.h_norm ** 2, norms.v_norm ** 2

    w_h_sq, w_v_sq = jax.vmap(energies)(w)
    return DifferenceEnergy(times=jnp.asarray(times), w_h_sq=w_h_sq, w_v_int=cumulative_trapezoid(w_v_sq, times))


def continuous_dependence_constant(energy: DifferenceEnergy) -> Tuple[float, float]:
    """
    Empirical Gronwall constants of a difference run: max_t ||w(t)||_H^2 / ||w(0)||_H^2 and
    max_t int_0^t ||w||_V^2 / ||w(0)||_H^2.

    Raises:
        ValueError: if w(0) = 0.
    """
    initial = float(energy.w_h_sq[0])
    if not initial > 0.:
        raise ValueError("Expected a nonzero initial difference.")
    return float(jnp.max(energy.w_h_sq)) / initial, float(jnp.max(energy.w_v_int)) / initial


def step(state: FlowState, forcing: Forcing, laws: Laws, params: PhysicalParams, grid: Grid,
         cfg: SolverConfig) -> FlowState:
    """
    Advance a state by cfg.dt.

    Raises:
        ConvergenceError: if the implicit solve or the projection fails its tolerance.
    """
    return get_stepper(params, grid, laws, forcing, cfg).step(state)


def run_to_time(state: FlowState, forcing: Forcing, laws: Laws, params: PhysicalParams, grid: Grid,
                cfg: SolverConfig, t_end: float, cadence: int = 1, store_snapshots: bool = False,
                observers: Optional[Dict[str, Callable[[FlowState], FloatArray]]] = None) -> TrajectorySummary:
    """
    Advance until t_end, sampling the observer series every `cadence` steps. t_end = state.t gives an empty
    series and the unchanged state.
    """
    return get_stepper(params, grid, laws, forcing, cfg).run_to_time(state, t_end, cadence=cadence,
                                                                     store_snapshots=store_snapshots,
                                                                     observers=observers)
