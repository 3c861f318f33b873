import warnings
from typing import Sequence

import jax
import numpy as np
from jax import lax, numpy as jnp

from jaxslip.core.fields import apply_masks, h_inner
from jaxslip.internals.logging import logger
from jaxslip.internals.types import FlowState, TangentState, Field, Forcing, Laws, PhysicalParams, Grid, \
    SolverConfig, QuasiDiffReport
from jaxslip.solver.stepper import ChannelStepper, get_stepper

__all__ = [
    'tangent_step',
    'linearised_run',
    'quasidiff_ratios'
]


def tangent_step(tstate: TangentState, base: FlowState, laws: Laws, params: PhysicalParams, grid: Grid,
                 cfg: SolverConfig, forcing: Forcing = Forcing()) -> TangentState:
    """
    Advance a tangent state by one step of the scheme linearised about `base` (the base state at the same time).
    The wall law enters through its Jacobian.
    """
    return get_stepper(params, grid, laws, forcing, cfg).tangent_step(tstate, base)


def linearised_run(stepper: ChannelStepper, base: FlowState, tangent: TangentState, num_steps: int):
    """
    Advance base and tangent together for `num_steps` steps.

    Returns:
        (final base, final tangent)
    """

    def body(carry, _):
        return stepper.linearised_advance(*carry), None

    (base, tangent), _ = jax.jit(lambda c: lax.scan(body, c, None, length=num_steps))((base, tangent))
    return base, tangent


def quasidiff_ratios(stepper: ChannelStepper, u0: FlowState, direction: Field, epsilons: Sequence[float],
                     t_end: float, zero_tol: float = 1e-9) -> QuasiDiffReport:
    """
    Remainders of the linearisation of the solution map S(t):

        e(eps) = ||S(t_end)(u0 + eps d) - S(t_end) u0 - U_eps(t_end)||_H,  U_eps(0) = eps d,

    reported as e(eps) / eps, which should decrease toward zero with eps.

    Args:
        stepper: the stepper
        u0: base initial state
        direction: perturbation direction (admissible, divergence-free)
        epsilons: strictly decreasing positive amplitudes
        t_end: final time
        zero_tol: remainders below this count as exact (linear problems)

    Returns:
        QuasiDiffReport; `floor` is the smallest remainder observed

    Raises:
        ValueError: on bad epsilons or t_end.
    """
    epsilons = np.asarray(epsilons, float)
    if epsilons.ndim != 1 or epsilons.size < 1 or np.any(epsilons <= 0.) or np.any(np.diff(epsilons) >= 0.):
        raise ValueError(f"Expected strictly decreasing positive epsilons, got {epsilons}.")
    num_steps = stepper.num_steps_to(u0, t_end)
    if num_steps < 1:
        raise ValueError(f"Expected t_end > u0.t, got t_end={t_end}, t={float(u0.t)}.")
    direction = apply_masks(direction, stepper.grid)
    tangent = stepper.zero_tangent(u0.t)._replace(u=direction.u, v=direction.v, g=direction.g)
    base, tangent = linearised_run(stepper, u0, tangent, num_steps)
    errors = []
    for eps in epsilons:
        perturbed = u0._replace(u=u0.u + eps * direction.u, v=u0.v + eps * direction.v, g=u0.g + eps * direction.g)
        final = stepper.run(perturbed, num_steps, cadence=num_steps).final_state
        remainder = jax.tree.map(lambda p, b, d: p - b - eps * d, final.field, base.field, tangent.field)
        errors.append(float(jnp.sqrt(h_inner(remainder, remainder, stepper.params.beta, stepper.grid))))
    errors = np.asarray(errors)
    ratios = errors / epsilons
    exact = bool(np.max(errors) <= zero_tol)
    decreasing = exact or bool(np.all(np.diff(ratios) < 0.))
    floor = float(np.min(errors))
    if not decreasing:
        warnings.warn(f"Linearisation remainders stagnate: ratios {ratios}, floor {floor:.3e}.")
    logger.info(f"Quasidifferential ratios {ratios} for epsilons {epsilons}.")
    return QuasiDiffReport(epsilons=epsilons, errors=errors, ratios=ratios, decreasing=decreasing, floor=floor)
