import pytest

from jaxslip.constitutive.laws import linear_laws
from jaxslip.core.fields import state_from_field, field_from_stream_function
from jaxslip.core.grid import build_grid
from jaxslip.harness.forcing import zero_forcing
from jaxslip.internals.random import bump_stream_function
from jaxslip.internals.types import PhysicalParams, SolverConfig
from jaxslip.solver.stepper import get_stepper


@pytest.fixture(scope='package')
def small_problem():
    params = PhysicalParams(alpha=1., beta=1.)
    grid = build_grid(params, 2, 16, 8)
    return params, grid


@pytest.fixture(scope='package')
def bump_state(small_problem):
    _, grid = small_problem
    return state_from_field(field_from_stream_function(bump_stream_function(1., 0., 1.), grid), grid)


@pytest.fixture(scope='package')
def stokes_stepper(small_problem):
    params, grid = small_problem
    return get_stepper(params, grid, linear_laws(1.), zero_forcing(),
                       SolverConfig(dt=0.01, convection_scheme='none'))


@pytest.fixture(scope='package')
def navier_stokes_stepper(small_problem):
    params, grid = small_problem
    return get_stepper(params, grid, linear_laws(1.), zero_forcing(), SolverConfig(dt=0.01))
