from functools import lru_cache, partial
from typing import Callable, Dict, Optional, Tuple

import jax
import numpy as np
from jax import lax, numpy as jnp
from jax.scipy.sparse.linalg import cg, gmres

from jaxslip.core.fields import compute_norms, divergence, h_inner, sample_forcing, zero_field, apply_masks
from jaxslip.core.grid import check_params, quadrature_weights, velocity_masks
from jaxslip.errors import ConvergenceError
from jaxslip.internals.logging import logger
from jaxslip.internals.types import PhysicalParams, Grid, Laws, Forcing, SolverConfig, FlowState, Field, \
    TangentState, StepDiagnostics, TrajectorySummary, NormReport, FloatArray, CONVECTION_SCHEMES, float_type
from jaxslip.solver.operators import dissipation, convection, field_dot, field_axpy
from jaxslip.solver.pressure import PressureSolver

__all__ = [
    'check_solver_config',
    'ChannelStepper',
    'get_stepper'
]


def check_solver_config(cfg: SolverConfig):
    if not cfg.dt > 0:
        raise ValueError(f"Expected dt > 0, got dt={cfg.dt}.")
    if not cfg.div_tol > 0:
        raise ValueError(f"Expected div_tol > 0, got div_tol={cfg.div_tol}.")
    if not 0.5 <= cfg.theta <= 1.:
        raise ValueError(f"Expected theta in [0.5, 1], got theta={cfg.theta}.")
    if cfg.convection_scheme not in CONVECTION_SCHEMES:
        raise ValueError(f"Invalid convection scheme {cfg.convection_scheme}, expected one of {CONVECTION_SCHEMES}.")
    if cfg.newton_maxiter < 1:
        raise ValueError(f"Expected newton_maxiter >= 1, got {cfg.newton_maxiter}.")


def _norm(field: Field) -> FloatArray:
    return jnp.sqrt(field_dot(field, field))


class ChannelStepper:
    """
    IMEX projection stepper for the channel with the dynamic slip wall.

    Per step: diffusion and the wall law theta-implicit (Newton on the coupled interior/wall unknowns, Krylov
    linear solves), convection explicit second-order Adams-Bashforth (forward Euler on the first step),
    then projection onto discretely divergence-free fields. The wall trace g is an unknown of the implicit solve
    and is left untouched by the projection.

    Args:
        params: nondimensional parameters (alpha, beta are used; nu enters through the laws)
        grid: the grid
        laws: stress and slip laws
        forcing: the forcing
        cfg: solver controls
    """

    def __init__(self, params: PhysicalParams, grid: Grid, laws: Laws, forcing: Forcing, cfg: SolverConfig):
        check_params(params)
        check_solver_config(cfg)
        self.params = params
        self.grid = grid
        self.laws = laws
        self.forcing = forcing
        self.cfg = cfg
        weights = quadrature_weights(grid)
        self._mass = Field(u=weights['u'], v=weights['v'], g=params.beta * weights['g'])
        self._mask = Field(*velocity_masks(grid))
        self._pressure = PressureSolver(grid, method=cfg.pressure_solver, tol=cfg.linear_tol,
                                        maxiter=cfg.linear_maxiter)
        self._symmetric = laws.stress.kind == 'linear'
        self._fixed_forcing = None if forcing.time_dependent else apply_masks(sample_forcing(forcing, grid), grid)
        self._inverse_diagonal = self._jacobi_inverse_diagonal()
        self._advance_jit = jax.jit(self.advance)
        self._tangent_jit = jax.jit(self.linearised_advance)
        self._runners: Dict[Tuple[int, int, bool], Callable] = {}

    def __repr__(self):
        return f"ChannelStepper(grid={self.grid}, dt={self.cfg.dt}, theta={self.cfg.theta}, " \
               f"convection={self.cfg.convection_scheme}, stress={self.laws.stress.kind}, slip={self.laws.slip.kind})"

    # Operators

    def forcing_at(self, t: FloatArray) -> Field:
        if self._fixed_forcing is not None:
            return self._fixed_forcing
        return apply_masks(sample_forcing(self.forcing, self.grid, t), self.grid)

    def dissipation(self, field: Field) -> Field:
        return dissipation(self.laws, self.params.alpha, field, self.grid)

    def convection(self, field: Field) -> Field:
        return convection(field, self.grid, self.cfg.convection_scheme)

    def h_inner(self, a: Field, b: Field) -> FloatArray:
        return h_inner(a, b, self.params.beta, self.grid)

    def norms(self, field: Field) -> NormReport:
        return compute_norms(field, self.params, self.grid)

    def energy_residual(self, previous: Field, current: Field, t: FloatArray) -> FloatArray:
        """
        Residual of the discrete energy identity over one step,
        |(E(u^{n+1}) - E(u^n))/dt + int S:D + alpha int s.u - ((f, h), u)_H| with E = 1/2 ||.||_H^2,
        the dissipation and work evaluated at the theta-level.
        """
        theta = self.cfg.theta
        mid = jax.tree.map(lambda a, b: theta * a + (1. - theta) * b, current, previous)
        forcing = self.forcing_at(t + theta * self.cfg.dt)
        energy_change = 0.5 * (self.h_inner(current, current) - self.h_inner(previous, previous)) / self.cfg.dt
        return jnp.abs(energy_change + field_dot(self.dissipation(mid), mid) - self.h_inner(forcing, mid))

    # Time stepping

    def _jacobi_inverse_diagonal(self) -> Field:
        """
        Inverse diagonal of M + dt theta A'(0) on the free degrees of freedom (1 on fixed ones), found by probing the
        linearised operator with coloured unit vectors. The stencil couples nearest neighbours only, so colours
        three apart in each direction do not interact.
        """
        grid = self.grid
        zero = zero_field(grid)
        linearised = jax.jit(lambda d: jax.jvp(self.dissipation, (zero,), (d,))[1])
        stride_x = 3
        if grid.periodic:
            # colours must not collide across the wrap
            stride_x = next(m for m in range(3, grid.nx + 1) if grid.nx % m == 0)
        diagonal = {}
        for name in Field._fields:
            shape = getattr(zero, name).shape
            colour_x = np.arange(shape[0]) % stride_x
            colour_y = np.arange(shape[1]) % 3 if len(shape) == 2 else None
            total = np.zeros(shape, float_type)
            for a in range(stride_x):
                for b in range(3 if colour_y is not None else 1):
                    if colour_y is None:
                        colour_mask = (colour_x == a).astype(float_type)
                    else:
                        colour_mask = np.logical_and((colour_x == a)[:, None], (colour_y == b)[None, :]).astype(float_type)
                    response = getattr(linearised(zero._replace(**{name: jnp.asarray(colour_mask)})), name)
                    total += colour_mask * np.asarray(response)
            diagonal[name] = total
        scale = self.cfg.dt * self.cfg.theta

        def invert(mass, diag, mask):
            full = np.asarray(mass) + scale * diag
            free = np.logical_and(np.asarray(mask) > 0., full > 0.)
            return jnp.asarray(np.where(free, 1. / np.where(free, full, 1.), 1.))

        return Field(*(invert(getattr(self._mass, name), diagonal[name], getattr(self._mask, name))
                       for name in Field._fields))

    def _implicit_solve(self, field: Field, constant: Field):
        """
        Newton iteration for M (Y - X) + dt theta A(Y) + constant = 0 on the free degrees of freedom. Residuals are
        measured against the size of the terms, so that steps near a steady state stop at roundoff.
        """
        cfg = self.cfg
        scale = cfg.dt * cfg.theta

        def residual(y: Field) -> Field:
            r = jax.tree.map(lambda m, a, b, c: m * (a - b) + c, self._mass, y, field, constant)
            r = field_axpy(scale, self.dissipation(y), r)
            return jax.tree.map(jnp.multiply, self._mask, r)

        def body(carry):
            y, r, iteration, r0 = carry

            def jacobian(delta: Field) -> Field:
                _, directional = jax.jvp(self.dissipation, (y,), (delta,))
                out = jax.tree.map(lambda m, d, a: m * d + scale * a, self._mass, delta, directional)
                return jax.tree.map(lambda k, o, d: k * o + (1. - k) * d, self._mask, out, delta)

            rhs = jax.tree.map(jnp.negative, r)
            preconditioner = partial(jax.tree.map, jnp.multiply, self._inverse_diagonal)
            if self._symmetric:
                delta, _ = cg(jacobian, rhs, tol=cfg.linear_tol, atol=cfg.linear_tol * r0, maxiter=cfg.linear_maxiter,
                              M=preconditioner)
            else:
                delta, _ = gmres(jacobian, rhs, tol=cfg.linear_tol, atol=cfg.linear_tol * r0, restart=50,
                                 maxiter=cfg.linear_maxiter, solve_method='batched', M=preconditioner)
            y = jax.tree.map(jnp.add, y, delta)
            return y, residual(y), iteration + 1, r0

        def cond(carry):
            _, r, iteration, r0 = carry
            return jnp.logical_and(iteration < cfg.newton_maxiter, _norm(r) > cfg.newton_tol * r0)

        r_init = residual(field)
        term_size = _norm(jax.tree.map(lambda k, c: k * c, self._mask, constant)) + \
            _norm(jax.tree.map(lambda k, m, x: k * m * x, self._mask, self._mass, field))
        reference = _norm(r_init) + term_size
        y, r, iterations, _ = lax.while_loop(cond, body, (field, r_init, jnp.asarray(0), reference))
        relative = jnp.where(reference > 0., _norm(r) / jnp.where(reference > 0., reference, 1.), 0.)
        return y, iterations, relative

    def advance(self, state: FlowState) -> Tuple[FlowState, StepDiagnostics]:
        """
        One time step. Pure and traceable; use `step` for the checked version.
        """
        cfg = self.cfg
        field = state.field
        forcing = self.forcing_at(state.t + cfg.theta * cfg.dt)
        conv_now = self.convection(field)
        explicit = jax.tree.map(lambda c, h: jnp.where(state.num_steps > 0, 1.5 * c - 0.5 * h, c),
                                conv_now, state.conv)
        constant = jax.tree.map(lambda e, m, f: cfg.dt * (e - m * f), explicit, self._mass, forcing)
        if cfg.theta < 1.:
            constant = field_axpy(cfg.dt * (1. - cfg.theta), self.dissipation(field), constant)
        intermediate, iterations, relative = self._implicit_solve(field, constant)
        projected, p, pressure_residual = self._pressure.project(intermediate, cfg.dt)
        next_state = FlowState(
            u=projected.u,
            v=projected.v,
            g=projected.g,
            p=p,
            t=state.t + cfg.dt,
            conv=conv_now,
            num_steps=state.num_steps + 1
        )
        diagnostics = StepDiagnostics(
            newton_iterations=iterations,
            newton_residual=relative,
            converged=relative <= cfg.newton_tol,
            div_residual=jnp.max(jnp.abs(divergence(projected, self.grid))),
            pressure_residual=pressure_residual,
            energy_residual=self.energy_residual(field, projected, state.t)
        )
        return next_state, diagnostics

    def _check_pressure(self, worst: float):
        if not worst <= self._pressure.residual_tol:
            logger.info(f"Pressure solve stopped at relative residual {worst:.3e}.")
            raise ConvergenceError("Pressure Poisson solve did not converge", worst)

    def _check(self, diagnostics: StepDiagnostics):
        converged = np.asarray(diagnostics.converged)
        if not np.all(converged):
            worst = float(np.max(np.asarray(diagnostics.newton_residual)))
            logger.info(f"Implicit solve failed to converge, relative residual {worst:.3e}.")
            raise ConvergenceError("Implicit diffusion/wall solve did not converge", worst)
        self._check_pressure(float(np.max(np.asarray(diagnostics.pressure_residual))))
        div = float(np.max(np.asarray(diagnostics.div_residual)))
        if div > self.cfg.div_tol:
            logger.info(f"Projection left divergence {div:.3e} above div_tol={self.cfg.div_tol}.")
            raise ConvergenceError("Pressure projection did not reach div_tol", div)

    def step(self, state: FlowState) -> FlowState:
        """
        Advance by dt.

        Raises:
            ConvergenceError: if the implicit solve or the projection fails its tolerance.
        """
        next_state, diagnostics = self._advance_jit(state)
        self._check(diagnostics)
        return next_state

    def step_with_diagnostics(self, state: FlowState) -> Tuple[FlowState, StepDiagnostics]:
        return self._advance_jit(state)

    def linearised_advance(self, base: FlowState, tangent: TangentState) -> Tuple[FlowState, TangentState]:
        """
        Advance the base state and the tangent state together: the tangent follows the same discrete scheme
        linearised about the base (forward-mode derivative of `advance`).
        """

        def advance_fields(fields):
            u, v, g, conv = fields
            next_state, _ = self.advance(base._replace(u=u, v=v, g=g, conv=conv))
            return next_state.u, next_state.v, next_state.g, next_state.p, next_state.conv

        primals = (base.u, base.v, base.g, base.conv)
        tangents = (tangent.u, tangent.v, tangent.g, tangent.conv)
        out, d_out = jax.jvp(advance_fields, (primals,), (tangents,))
        next_base = base._replace(u=out[0], v=out[1], g=out[2], p=out[3], conv=out[4], t=base.t + self.cfg.dt,
                                  num_steps=base.num_steps + 1)
        next_tangent = TangentState(u=d_out[0], v=d_out[1], g=d_out[2], sigma=d_out[3], t=tangent.t + self.cfg.dt,
                                    conv=d_out[4])
        return next_base, next_tangent

    def tangent_step(self, tangent: TangentState, base: FlowState) -> TangentState:
        _, next_tangent = self._tangent_jit(base, tangent)
        return next_tangent

    def zero_tangent(self, t: FloatArray = 0.) -> TangentState:
        zero = zero_field(self.grid)
        return TangentState(u=zero.u, v=zero.v, g=zero.g, sigma=jnp.zeros((self.grid.nx, self.grid.ny), float_type),
                            t=jnp.asarray(t, float_type), conv=zero)

    # Runs

    def _observe(self, state: FlowState, observers):
        extras = {name: fn(state) for name, fn in observers.items()} if observers else None
        return state.t, self.norms(state.field), extras

    def _runner(self, num_blocks: int, cadence: int, store: bool, observers):
        def inner(state, _):
            return self.advance(state)

        def outer(state, _):
            state, diagnostics = lax.scan(inner, state, None, length=cadence)
            t, norms, extras = self._observe(state, observers)
            last = jax.tree.map(lambda x: x[-1], diagnostics)
            record = dict(
                t=t,
                norms=norms,
                extras=extras,
                div_residual=last.div_residual,
                energy_residual=last.energy_residual,
                converged=jnp.all(diagnostics.converged),
                newton_residual=jnp.max(diagnostics.newton_residual),
                max_div=jnp.max(diagnostics.div_residual),
                max_pressure_residual=jnp.max(diagnostics.pressure_residual)
            )
            return state, (record, state if store else None)

        def run(state):
            return lax.scan(outer, state, None, length=num_blocks)

        return jax.jit(run)

    def run(self, state: FlowState, num_steps: int, cadence: int = 1, store_snapshots: bool = False,
            observers: Optional[Dict[str, Callable[[FlowState], FloatArray]]] = None) -> TrajectorySummary:
        """
        Advance `num_steps` steps, recording observations every `cadence` steps (and after the last step).
        The series starts with the initial state when num_steps > 0.

        Raises:
            ConvergenceError: if any step fails its tolerances.
        """
        if num_steps < 0:
            raise ValueError(f"Expected num_steps >= 0, got {num_steps}.")
        if cadence < 1:
            raise ValueError(f"Expected cadence >= 1, got {cadence}.")
        if num_steps == 0:
            empty = np.zeros((0,), float_type)
            return TrajectorySummary(times=empty, norms=NormReport(*([empty] * len(NormReport._fields))),
                                     div_residual=empty, energy_residual=empty, final_state=state, snapshots=None,
                                     cadence=cadence, extras=None)
        t0, norms0, extras0 = self._observe(state, observers)
        initial = dict(t=t0, norms=norms0, extras=extras0,
                       div_residual=jnp.max(jnp.abs(divergence(state, self.grid))),
                       energy_residual=jnp.zeros((), float_type))
        records = [jax.tree.map(lambda x: jnp.asarray(x)[None], initial)]
        snapshots = [jax.tree.map(lambda x: jnp.asarray(x)[None], state)] if store_snapshots else []
        observer_key = tuple(sorted(observers)) if observers else None
        for length, count in ((cadence, num_steps // cadence), (num_steps % cadence, 1)):
            if length == 0 or count == 0:
                continue
            key = (count, length, store_snapshots, observer_key)
            if key not in self._runners:
                self._runners[key] = self._runner(count, length, store_snapshots, observers)
            state, (record, stored) = self._runners[key](state)
            if not bool(np.all(np.asarray(record['converged']))):
                worst = float(np.max(np.asarray(record['newton_residual'])))
                raise ConvergenceError("Implicit diffusion/wall solve did not converge", worst)
            self._check_pressure(float(np.max(np.asarray(record["max_pressure_residual"]))))
            worst_div = float(np.max(np.asarray(record['max_div'])))
            if worst_div > self.cfg.div_tol:
                raise ConvergenceError("Pressure projection did not reach div_tol", worst_div)
            records.append(dict(t=record["t"], norms=record["norms"], extras=record["extras"],
                                div_residual=record["div_residual"], energy_residual=record["energy_residual"]))
            if store_snapshots:
                snapshots.append(stored)

        def gather(*leaves):
            return jnp.concatenate(leaves, axis=0)

        series = jax.tree.map(gather, *records)
        stacked = jax.tree.map(gather, *snapshots) if store_snapshots else None
        return TrajectorySummary(
            times=series["t"],
            norms=series["norms"],
            div_residual=series["div_residual"],
            energy_residual=series["energy_residual"],
            final_state=state,
            snapshots=stacked,
            cadence=cadence,
            extras=series["extras"]
        )

    def num_steps_to(self, state: FlowState, t_end: float) -> int:
        if t_end < float(state.t) - 1e-12:
            raise ValueError(f"Expected t_end >= state.t, got t_end={t_end}, t={float(state.t)}.")
        return int(round((t_end - float(state.t)) / self.cfg.dt))

    def run_to_time(self, state: FlowState, t_end: float, cadence: int = 1, store_snapshots: bool = False,
                    observers: Optional[Dict[str, Callable[[FlowState], FloatArray]]] = None) -> TrajectorySummary:
        return self.run(state, self.num_steps_to(state, t_end), cadence=cadence, store_snapshots=store_snapshots,
                        observers=observers)


@lru_cache(maxsize=16)
def get_stepper(params: PhysicalParams, grid: Grid, laws: Laws, forcing: Forcing, cfg: SolverConfig) -> ChannelStepper:
    """
    Cached stepper, so that repeated functional calls reuse the compiled kernels.
    """
    return ChannelStepper(params=params, grid=grid, laws=laws, forcing=forcing, cfg=cfg)
