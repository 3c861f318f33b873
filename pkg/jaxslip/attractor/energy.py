from typing import Optional, Tuple

import jax
import numpy as np
from jax import numpy as jnp

from jaxslip.internals.types import TrajectorySummary, FlowState, FloatArray
from jaxslip.solver.stepper import ChannelStepper

__all__ = [
    'energy_residual',
    'energy_residual_order'
]


def energy_residual(trajectory: TrajectorySummary, stepper: Optional[ChannelStepper] = None) -> FloatArray:
    """
    Per-step residual of the discrete energy identity

        |(E(u^{n+1}) - E(u^n)) / dt + int S(Du):Du + alpha int s(u).u - ((f, h), u)_H|,  E = 1/2 ||u||_H^2.

    Args:
        trajectory: a run recorded every step (cadence 1)
        stepper: if given, the residual is recomputed from the stored snapshots with this stepper's operators,
            otherwise the series recorded during the run is returned

    Returns:
        [S - 1] residuals, one per step

    Raises:
        ValueError: if the run was not recorded every step, or snapshots are missing when recomputing.
    """
    if trajectory.cadence != 1:
        raise ValueError(f"Expected a run recorded every step, got cadence={trajectory.cadence}.")
    if stepper is None:
        return jnp.asarray(trajectory.energy_residual)[1:]
    if trajectory.snapshots is None:
        raise ValueError("Recomputing the energy residual needs stored snapshots.")
    snapshots = trajectory.snapshots
    previous = jax.tree.map(lambda x: x[:-1], snapshots)
    current = jax.tree.map(lambda x: x[1:], snapshots)
    return jax.vmap(lambda p, c: stepper.energy_residual(p.field, c.field, p.t))(previous, current)


def energy_residual_order(coarse: ChannelStepper, fine: ChannelStepper, state: FlowState,
                          t_end: float) -> Tuple[float, float]:
    """
    Time-step refinement study of the energy residual: the same run with two steppers (typically dt and dt/2).

    Returns:
        (ratio of the mean residuals coarse / fine, observed order log2(ratio))
    """
    means = []
    for stepper in (coarse, fine):
        summary = stepper.run_to_time(state, t_end)
        means.append(float(jnp.mean(energy_residual(summary))))
    if means[1] <= 0.:
        return float('inf'), float('inf')
    ratio = means[0] / means[1]
    return ratio, float(np.log2(ratio)) if ratio > 0. else float('-inf')
