import numpy as np
import pytest
from jax import random, numpy as jnp

from jaxslip.core.fields import zero_field, zero_state, compute_norms, field_from_stream_function, divergence, \
    check_field, sample_forcing, h_inner
from jaxslip.core.grid import build_grid, x_faces
from jaxslip.internals.random import bump_stream_function, smooth_bump, random_admissible_field
from jaxslip.internals.types import PhysicalParams, Field, Forcing


@pytest.fixture(scope='module')
def params():
    return PhysicalParams(alpha=1.5, beta=2.)


@pytest.fixture(scope='module')
def grid(params):
    return build_grid(params, 2, 32, 16)


def test_zero_field_norms(params, grid):
    norms = compute_norms(zero_field(grid), params, grid)
    for value in norms:
        assert float(value) == 0.


@pytest.mark.parametrize('x_mode', ['dirichlet_ends', 'periodic'])
def test_constant_field_h_norm(params, x_mode):
    grid = build_grid(params, 2, 32, 16, x_mode)
    c = 0.7
    field = zero_field(grid)._replace(u=jnp.full((grid.nux, grid.ny), c), g=jnp.full((grid.nux,), c))
    norms = compute_norms(field, params, grid)
    # |Omega_n| = |Gamma_n| = 4
    np.testing.assert_allclose(norms.h_norm ** 2, c ** 2 * 4. + 2. * c ** 2 * 4., rtol=1e-12)
    np.testing.assert_allclose(norms.l2_gamma ** 2, c ** 2 * 4., rtol=1e-12)


def test_norm_identities(params, grid):
    field = random_admissible_field(random.PRNGKey(3), grid)
    norms = compute_norms(field, params, grid)
    np.testing.assert_allclose(norms.v_norm ** 2, norms.symgrad_l2 ** 2 + params.alpha * norms.l2_gamma ** 2,
                               rtol=1e-13)
    np.testing.assert_allclose(norms.h_norm ** 2, norms.l2_omega ** 2 + params.beta * norms.l2_gamma ** 2,
                               rtol=1e-13)
    np.testing.assert_allclose(h_inner(field, field, params.beta, grid), norms.h_norm ** 2, rtol=1e-13)
    assert all(float(v) >= 0. for v in norms)


def test_zero_state(grid):
    state = zero_state(grid, t=0.5)
    assert float(state.t) == 0.5
    assert state.p.shape == (grid.nx, grid.ny)
    assert int(state.num_steps) == 0


def test_check_field_mismatch(grid):
    with pytest.raises(ValueError, match='Dimension mismatch'):
        check_field(Field(u=jnp.zeros((3, 3)), v=jnp.zeros((grid.nx, grid.ny + 1)), g=jnp.zeros(grid.nux)), grid)


def test_stream_function_field(grid):
    field = field_from_stream_function(bump_stream_function(1., 0., 1.), grid)
    np.testing.assert_allclose(divergence(field, grid), 0., atol=1e-12)
    # trace is the exact wall derivative of psi, equal to the bump itself
    np.testing.assert_allclose(field.g, smooth_bump(jnp.asarray(x_faces(grid))), atol=1e-12)
    np.testing.assert_allclose(field.v[:, [0, -1]], 0.)


def test_sample_forcing(grid):
    def f(t, x, y):
        return x + 0. * y, 2. * y + 0. * x

    def h(t, x):
        return 1. + t + 0. * x

    sampled = sample_forcing(Forcing(f=f, h=h, time_dependent=True), grid, t=0.5, length=2.)
    np.testing.assert_allclose(sampled.u[:, 0], 2. * x_faces(grid))
    np.testing.assert_allclose(sampled.v[0], 4. * np.arange(grid.ny + 1) * grid.dy)
    np.testing.assert_allclose(sampled.g, 1.5)
    empty = sample_forcing(Forcing(), grid)
    assert float(jnp.max(jnp.abs(empty.u))) == 0.
