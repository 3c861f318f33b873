from typing import Optional

import jax
import numpy as np
from jax import random, numpy as jnp

from jaxslip.attractor.dimension import DEFAULT_KAPPA
from jaxslip.attractor.family import random_family, stokes_modes, orthonormal_transform
from jaxslip.constants.eigenvalue import capital_lambda
from jaxslip.core.fields import compute_norms
from jaxslip.core.scaling import forcing_norms
from jaxslip.internals.cumulative_ops import cumulative_trapezoid
from jaxslip.internals.logging import logger
from jaxslip.internals.types import Field, FlowState, TangentState, TraceEstimate, InequalityReport, FloatArray
from jaxslip.solver.operators import field_dot
from jaxslip.solver.stepper import ChannelStepper

__all__ = [
    'TRACE_STRATEGIES',
    'linearised_operator_form',
    'trace_integrand',
    'n_trace_estimate',
    'trace_term_check'
]

TRACE_STRATEGIES = ('random', 'stokes', 'tangent_flow')


def linearised_operator_form(stepper: ChannelStepper, base: Field, phi: Field) -> FloatArray:
    """
    (L(u) phi, phi)_H = -(A'(u) phi + C'(u) phi) . phi for a divergence-free phi; the pressure term drops out.
    """
    _, d_dissipation = jax.jvp(stepper.dissipation, (base,), (phi,))
    _, d_convection = jax.jvp(stepper.convection, (base,), (phi,))
    return -field_dot(jax.tree.map(jnp.add, d_dissipation, d_convection), phi)


def trace_integrand(stepper: ChannelStepper, base: Field, phis: Field) -> FloatArray:
    """sum_j (L(u) phi_j, phi_j)_H over a stacked family."""
    return jnp.sum(jax.vmap(lambda phi: linearised_operator_form(stepper, base, phi))(phis))


def _transform_tangents(tangents: TangentState, transform: FloatArray) -> TangentState:
    # the family is a linear image of the propagated tangents, so the same combination applies to every leaf
    return jax.tree.map(lambda x: jnp.tensordot(transform, x, axes=1) if jnp.ndim(x) > 1 else x, tangents)


def n_trace_estimate(stepper: ChannelStepper, u0: FlowState, N: int, t_end: float, strategy: str = 'random',
                     cadence: int = 1, kappa: float = DEFAULT_KAPPA, forcing_h_norm: Optional[float] = None,
                     seed: int = 0) -> TraceEstimate:
    """
    Lower estimate of the N-trace along the trajectory from u0:

        q_emp = (2/t) int_0^t sum_j (L(tau, u0) phi_j, phi_j)_H dtau

    by trapezoid quadrature over samples every `cadence` steps, compared against the theoretical bound
    q_theory = -N / Lambda + 8 kappa Lambda ||(f, h)||_H^2.

    Family strategies:
        random: fresh random admissible fields at every sample time;
        stokes: the leading N modes of the Stokes operator with the dynamic slip wall;
        tangent_flow: random fields propagated by the linearised scheme and re-orthonormalised at every sample.

    Args:
        stepper: the stepper (nondimensional problem)
        u0: initial state, ideally after burn-in
        N: family size
        t_end: end of the quadrature window
        strategy: one of TRACE_STRATEGIES
        cadence: steps between samples
        kappa: Lieb-Thirring constant of the theoretical bound
        forcing_h_norm: ||(f, h)||_H, computed from the stepper's forcing when None
        seed: seed of the random families

    Returns:
        TraceEstimate, with sigma the standard error of the time average and passed = q_emp <= q_theory + 3 sigma

    Raises:
        ValueError: on bad arguments or a degenerate family.
    """
    if strategy not in TRACE_STRATEGIES:
        raise ValueError(f"Invalid strategy {strategy}, expected one of {TRACE_STRATEGIES}.")
    if N < 1:
        raise ValueError(f"Expected N >= 1, got N={N}.")
    params, grid = stepper.params, stepper.grid
    num_steps = stepper.num_steps_to(u0, t_end)
    if num_steps < cadence:
        raise ValueError(f"Expected at least two samples, got {num_steps} steps with cadence {cadence}.")
    if forcing_h_norm is None:
        forcing_h_norm = float(forcing_norms(stepper.forcing, params, grid, t=u0.t)[0])
    key = random.PRNGKey(seed)
    integrand = jax.jit(lambda base, phis: trace_integrand(stepper, base, phis))

    samples = []
    times = []
    if strategy == 'tangent_flow':
        family = random_family(key, N, params.beta, grid)
        zero = stepper.zero_tangent(u0.t)
        tangents = jax.tree.map(lambda x: jnp.broadcast_to(x, (N,) + jnp.shape(x)), zero)
        tangents = tangents._replace(u=family.phis.u, v=family.phis.v, g=family.phis.g)
        block = _tangent_block(stepper, cadence)
        base = u0
        samples.append(float(integrand(base.field, family.phis)))
        times.append(float(base.t))
        for _ in range(num_steps // cadence):
            base, tangents = block(base, tangents)
            transform = orthonormal_transform(tangents.field, params.beta, grid) / np.sqrt(2.)
            tangents = _transform_tangents(tangents, jnp.asarray(transform))
            samples.append(float(integrand(base.field, tangents.field)))
            times.append(float(base.t))
    else:
        run = stepper.run(u0, num_steps - num_steps % cadence, cadence=cadence, store_snapshots=True)
        snapshots = run.snapshots
        if strategy == 'stokes':
            phis = stokes_modes(stepper.laws, params.alpha, params.beta, grid, N).phis
            samples = list(np.asarray(jax.vmap(lambda s: integrand(s.field, phis))(snapshots)))
        else:
            for k in range(int(run.times.shape[0])):
                family = random_family(random.fold_in(key, k), N, params.beta, grid)
                state = jax.tree.map(lambda x: x[k], snapshots)
                samples.append(float(integrand(state.field, family.phis)))
        times = list(np.asarray(run.times))
    samples = np.asarray(samples, float)
    times = np.asarray(times, float)
    window = times[-1] - times[0]
    q_empirical = float(2. * cumulative_trapezoid(samples, times)[-1] / window)
    sigma = float(2. * np.std(samples, ddof=1) / np.sqrt(samples.size)) if samples.size > 1 else 0.
    lambda_cap = capital_lambda(params.alpha, params.beta, params.L)
    q_theory = -N / lambda_cap + 8. * kappa * lambda_cap * forcing_h_norm ** 2
    passed = bool(q_empirical <= q_theory + 3. * sigma)
    logger.info(f"N-trace N={N} ({strategy}): q_emp={q_empirical:.4g} +- {sigma:.2g}, q_theory={q_theory:.4g}.")
    return TraceEstimate(N=int(N), q_empirical=q_empirical, q_theory=float(q_theory), sigma=sigma, strategy=strategy,
                         kappa=float(kappa), lambda_cap=lambda_cap, forcing_h_norm=float(forcing_h_norm),
                         passed=passed)


def _tangent_block(stepper: ChannelStepper, length: int):
    def one(base, tangents):
        next_base, next_tangents = jax.vmap(stepper.linearised_advance, in_axes=(None, 0))(base, tangents)
        return jax.tree.map(lambda x: x[0], next_base), next_tangents

    def body(carry, _):
        return one(*carry), None

    @jax.jit
    def block(base, tangents):
        (base, tangents), _ = jax.lax.scan(body, (base, tangents), None, length=length)
        return base, tangents

    return block


def trace_term_check(stepper: ChannelStepper, base: Field, phi: Field, tol: float = 0.05) -> InequalityReport:
    """
    Term-by-term check (L phi, phi)_H <= -2 nu ||phi||_V^2 + ||grad u|| || |phi|^2 ||_{L2} for linear laws.
    The reported ratio is ((L phi, phi)_H + 2 nu ||phi||_V^2) / (||grad u|| ||phi||_{L4}^2), bound 1; `tol` allows
    for the quadrature of the L4 norm.

    Raises:
        ValueError: for nonlinear laws.
    """
    laws = stepper.laws
    if laws.stress.kind != 'linear' or laws.slip.kind != 'linear':
        raise ValueError("The term-by-term check applies to linear laws only.")
    phi_norms = compute_norms(phi, stepper.params, stepper.grid)
    base_norms = compute_norms(base, stepper.params, stepper.grid)
    lhs = float(linearised_operator_form(stepper, base, phi)) + 2. * laws.stress.nu * float(phi_norms.v_norm) ** 2
    rhs = float(base_norms.grad_l2) * float(phi_norms.l4_omega) ** 2
    if rhs > 0.:
        ratio = lhs / rhs
    else:
        ratio = 0. if lhs <= 1e-12 else float('inf')
    return InequalityReport(name='trace_term', analytic_constant=1., worst_observed_ratio=float(ratio),
                            sample_count=1, passed=bool(ratio <= 1. + tol))
