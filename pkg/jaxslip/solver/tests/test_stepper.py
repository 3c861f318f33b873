import numpy as np
import pytest
from jax import random, numpy as jnp

from jaxslip.constitutive.laws import linear_laws, linear_stress, linear_slip, example_shear_dependent_stress, \
    example_nonlinear_slip
from jaxslip.core.fields import zero_state, state_from_field, field_from_stream_function
from jaxslip.core.grid import build_grid, y_centres
from jaxslip.errors import ConvergenceError
from jaxslip.harness.forcing import constant_forcing, zero_forcing
from jaxslip.internals.random import bump_stream_function, random_admissible_field
from jaxslip.internals.types import PhysicalParams, SolverConfig, Laws, Forcing
from jaxslip.solver.operators import convection, field_dot
from jaxslip.solver.stepper import ChannelStepper, check_solver_config, get_stepper


def _steady_profile(alpha: float, ny: int) -> np.ndarray:
    params = PhysicalParams(alpha=alpha, beta=1.)
    grid = build_grid(params, 1, 4, ny, 'periodic')
    stepper = ChannelStepper(params, grid, linear_laws(1.), constant_forcing(1., 0.), SolverConfig(dt=0.05))
    num_steps = 160
    final = stepper.run(zero_state(grid), num_steps, cadence=num_steps).final_state
    return np.asarray(final.u[0])


@pytest.fixture(scope='module')
def slip_errors():
    errors = {}
    for ny in (16, 32, 64):
        y = y_centres(build_grid(PhysicalParams(alpha=1., beta=1.), 1, 4, ny))
        exact = -0.5 * y ** 2 + y / 3. + 1. / 6.
        errors[ny] = float(np.max(np.abs(_steady_profile(1., ny) - exact)))
    return errors


@pytest.mark.parametrize('ny', [16, 32, 64])
def test_slip_poiseuille(slip_errors, ny):
    assert slip_errors[ny] <= 4. / ny ** 2


def test_slip_poiseuille_order(slip_errors):
    orders = [np.log2(slip_errors[16] / slip_errors[32]), np.log2(slip_errors[32] / slip_errors[64])]
    assert min(orders) >= 1.8


def test_no_slip_limit():
    ny = 32
    y = y_centres(build_grid(PhysicalParams(alpha=1., beta=1.), 1, 4, ny))
    profile = _steady_profile(1e6, ny)
    np.testing.assert_allclose(profile, 0.5 * y * (1. - y), atol=1e-3)


def test_single_step_from_defaults():
    params = PhysicalParams(alpha=1., beta=1.)
    grid = build_grid(params, 1, 8, 8, 'periodic')
    stepper = ChannelStepper(params, grid, Laws(linear_stress(1.), linear_slip(1.)), Forcing(), SolverConfig(dt=0.01))
    state = state_from_field(random_admissible_field(random.PRNGKey(4), grid), grid)
    next_state, diagnostics = stepper.step_with_diagnostics(state)
    assert bool(diagnostics.converged)
    assert float(diagnostics.pressure_residual) <= 1e-8
    assert float(diagnostics.div_residual) <= 1e-10
    stepped = stepper.step(state)
    np.testing.assert_allclose(stepped.u, next_state.u)
    np.testing.assert_allclose(stepped.t, 0.01)
    assert int(stepped.num_steps) == 1


def test_zero_state_stays_zero():
    params = PhysicalParams(alpha=1., beta=1.)
    grid = build_grid(params, 1, 8, 8)
    stepper = ChannelStepper(params, grid, linear_laws(1.), zero_forcing(), SolverConfig(dt=0.01))
    trajectory = stepper.run(zero_state(grid), 5)
    final = trajectory.final_state
    for leaf in (final.u, final.v, final.g, final.p):
        assert float(jnp.max(jnp.abs(leaf))) == 0.
    assert float(jnp.max(trajectory.energy_residual)) == 0.
    assert trajectory.times.shape == (6,)
    np.testing.assert_allclose(trajectory.times[-1], 0.05)
    assert int(final.num_steps) == 5


@pytest.fixture(scope='module')
def transient():
    params = PhysicalParams(alpha=1., beta=1.)
    grid = build_grid(params, 2, 32, 16)
    state = state_from_field(field_from_stream_function(bump_stream_function(1., 0., 1.), grid), grid)
    return params, grid, state


def test_divergence_free_and_energy_decay(transient):
    params, grid, state = transient
    stepper = ChannelStepper(params, grid, linear_laws(1.), zero_forcing(),
                             SolverConfig(dt=0.01, convection_scheme='none'))
    trajectory = stepper.run_to_time(state, 0.2)
    assert float(jnp.max(trajectory.div_residual)) <= 1e-10
    h_norm = np.asarray(trajectory.norms.h_norm)
    # unforced Stokes flow loses energy every step
    assert np.all(np.diff(h_norm) <= 1e-12)
    assert h_norm[-1] < h_norm[0]


def test_energy_residual_first_order(transient):
    params, grid, state = transient
    means = []
    for dt in (0.005, 0.0025):
        stepper = ChannelStepper(params, grid, linear_laws(1.), zero_forcing(), SolverConfig(dt=dt))
        means.append(float(jnp.mean(stepper.run_to_time(state, 0.1).energy_residual[1:])))
    assert means[0] / means[1] >= 1.8


def test_skew_symmetric_convection(transient):
    _, grid, _ = transient
    field = random_admissible_field(random.PRNGKey(7), grid)
    conv = convection(field, grid, 'skew_symmetric')
    scale = float(jnp.sqrt(field_dot(conv, conv) * field_dot(field, field)))
    assert abs(float(field_dot(conv, field))) <= 1e-12 * scale
    assert float(field_dot(convection(field, grid, 'none'), convection(field, grid, 'none'))) == 0.


@pytest.mark.parametrize('x_mode', ['dirichlet_ends', 'periodic'])
def test_pressure_solvers_agree(x_mode):
    params = PhysicalParams(alpha=1., beta=0.5)
    grid = build_grid(params, 2, 16, 8, x_mode)
    state = state_from_field(random_admissible_field(random.PRNGKey(1), grid), grid)
    final = {}
    for method in ('diagonalisation', 'cg'):
        stepper = ChannelStepper(params, grid, linear_laws(1.), constant_forcing(0.5, 0.2),
                                 SolverConfig(dt=0.01, pressure_solver=method))
        final[method] = stepper.run(state, 3).final_state
    np.testing.assert_allclose(final['cg'].u, final['diagonalisation'].u, atol=1e-9)
    np.testing.assert_allclose(final['cg'].v, final['diagonalisation'].v, atol=1e-9)


def test_nonlinear_laws_converge(transient):
    params, grid, state = transient
    laws = Laws(stress=example_shear_dependent_stress(), slip=example_nonlinear_slip())
    stepper = ChannelStepper(params, grid, laws, zero_forcing(), SolverConfig(dt=0.01))
    trajectory = stepper.run(state, 5)
    assert float(jnp.max(trajectory.div_residual)) <= 1e-10
    assert np.all(np.isfinite(np.asarray(trajectory.norms.h_norm)))


def test_crank_nicolson(transient):
    params, grid, state = transient
    stepper = ChannelStepper(params, grid, linear_laws(1.), zero_forcing(), SolverConfig(dt=0.01, theta=0.5))
    trajectory = stepper.run(state, 5)
    assert float(trajectory.norms.h_norm[-1]) < float(trajectory.norms.h_norm[0])


def test_cadence_and_observers(transient):
    params, grid, state = transient
    stepper = ChannelStepper(params, grid, linear_laws(1.), zero_forcing(), SolverConfig(dt=0.01))
    trajectory = stepper.run(state, 7, cadence=3, store_snapshots=True,
                             observers=dict(g_max=lambda s: jnp.max(jnp.abs(s.g))))
    # initial sample, two full blocks and the remainder
    np.testing.assert_allclose(trajectory.times, [0., 0.03, 0.06, 0.07], atol=1e-12)
    assert trajectory.snapshots.u.shape == (4, grid.nux, grid.ny)
    assert trajectory.extras['g_max'].shape == (4,)
    np.testing.assert_allclose(trajectory.snapshots.u[-1], trajectory.final_state.u)


def test_empty_run(transient):
    params, grid, state = transient
    stepper = ChannelStepper(params, grid, linear_laws(1.), zero_forcing(), SolverConfig(dt=0.01))
    trajectory = stepper.run_to_time(state, 0.)
    assert trajectory.times.shape == (0,)
    assert trajectory.final_state is state


def test_check_solver_config():
    check_solver_config(SolverConfig(dt=0.1))
    with pytest.raises(ValueError):
        check_solver_config(SolverConfig(dt=0.))
    with pytest.raises(ValueError):
        check_solver_config(SolverConfig(dt=0.1, theta=0.3))
    with pytest.raises(ValueError):
        check_solver_config(SolverConfig(dt=0.1, convection_scheme='upwind'))


def test_failed_solve_raises(transient):
    params, grid, state = transient
    stepper = ChannelStepper(params, grid, linear_laws(1.), zero_forcing(),
                             SolverConfig(dt=0.01, div_tol=1e-30))
    with pytest.raises(ConvergenceError):
        stepper.run(state, 2)


def test_get_stepper_cached(transient):
    params, grid, _ = transient
    laws = linear_laws(1.)
    forcing = zero_forcing()
    cfg = SolverConfig(dt=0.01)
    assert get_stepper(params, grid, laws, forcing, cfg) is get_stepper(params, grid, laws, forcing, cfg)
