import numpy as np
import pytest
from jax import random, numpy as jnp

from jaxslip.attractor.tangent import tangent_step, linearised_run, quasidiff_ratios
from jaxslip.constitutive.laws import linear_laws, example_nonlinear_slip
from jaxslip.harness.forcing import zero_forcing
from jaxslip.harness.suite import QUASIDIFF_REDUCTION
from jaxslip.internals.random import random_admissible_field
from jaxslip.internals.types import Laws, SolverConfig
from jaxslip.solver.stepper import ChannelStepper


def _direction(stepper):
    direction = random_admissible_field(random.PRNGKey(4), stepper.grid)
    scale = 1. / jnp.sqrt(stepper.h_inner(direction, direction))
    return type(direction)(*(scale * x for x in direction))


def test_zero_tangent_stays_zero(navier_stokes_stepper, bump_state):
    stepper = navier_stokes_stepper
    base, tangent = linearised_run(stepper, bump_state, stepper.zero_tangent(), 3)
    for leaf in (tangent.u, tangent.v, tangent.g, tangent.sigma):
        assert float(jnp.max(jnp.abs(leaf))) == 0.
    np.testing.assert_allclose(base.t, 0.03)
    np.testing.assert_allclose(base.u, stepper.run(bump_state, 3).final_state.u, atol=1e-12)


def test_tangent_linear_in_direction(navier_stokes_stepper, bump_state):
    stepper = navier_stokes_stepper
    direction = _direction(stepper)
    tangent = stepper.zero_tangent()._replace(u=direction.u, v=direction.v, g=direction.g)
    doubled = stepper.zero_tangent()._replace(u=2. * direction.u, v=2. * direction.v, g=2. * direction.g)
    _, once = linearised_run(stepper, bump_state, tangent, 2)
    _, twice = linearised_run(stepper, bump_state, doubled, 2)
    np.testing.assert_allclose(twice.u, 2. * once.u, atol=1e-12)
    np.testing.assert_allclose(twice.g, 2. * once.g, atol=1e-12)


def test_tangent_step_matches_linearised_advance(navier_stokes_stepper, bump_state, small_problem):
    params, grid = small_problem
    stepper = navier_stokes_stepper
    direction = _direction(stepper)
    tangent = stepper.zero_tangent()._replace(u=direction.u, v=direction.v, g=direction.g)
    stepped = tangent_step(tangent, bump_state, stepper.laws, params, grid, stepper.cfg, stepper.forcing)
    _, expected = stepper.linearised_advance(bump_state, tangent)
    np.testing.assert_allclose(stepped.u, expected.u, atol=1e-12)
    np.testing.assert_allclose(stepped.t, 0.01)


def test_quasidiff_exact_for_linear_problem(stokes_stepper, bump_state):
    report = quasidiff_ratios(stokes_stepper, bump_state, _direction(stokes_stepper), [1e-1, 1e-2, 1e-3], 0.05)
    assert np.max(report.errors) <= 1e-9
    assert report.decreasing


def test_quasidiff_decreasing_with_nonlinearity(small_problem, bump_state):
    params, grid = small_problem
    laws = Laws(stress=linear_laws(1.).stress, slip=example_nonlinear_slip())
    stepper = ChannelStepper(params, grid, laws, zero_forcing(), SolverConfig(dt=0.01))
    report = quasidiff_ratios(stepper, bump_state, _direction(stepper), [1e-1, 1e-2, 1e-3], 0.05)
    assert report.decreasing
    assert np.all(np.diff(report.ratios) < 0.)
    assert report.ratios[-1] <= QUASIDIFF_REDUCTION * report.ratios[0]
    assert report.floor == float(np.min(report.errors))


def test_quasidiff_validation(stokes_stepper, bump_state):
    direction = _direction(stokes_stepper)
    with pytest.raises(ValueError):
        quasidiff_ratios(stokes_stepper, bump_state, direction, [1e-3, 1e-2], 0.05)
    with pytest.raises(ValueError):
        quasidiff_ratios(stokes_stepper, bump_state, direction, [1e-1, -1e-2], 0.05)
    with pytest.raises(ValueError):
        quasidiff_ratios(stokes_stepper, bump_state, direction, [1e-1], 0.)
