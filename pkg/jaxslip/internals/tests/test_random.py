import numpy as np
import pytest
from jax import random, numpy as jnp

from jaxslip.core.fields import divergence
from jaxslip.core.grid import build_grid
from jaxslip.internals.random import smooth_bump, channel_profile, random_admissible_field, \
    random_admissible_fields
from jaxslip.internals.types import PhysicalParams


def test_smooth_bump():
    np.testing.assert_allclose(smooth_bump(jnp.asarray(0.)), 1.)
    assert smooth_bump(jnp.asarray(1.)) == 0.
    assert smooth_bump(jnp.asarray(-1.5)) == 0.
    assert 0. < smooth_bump(jnp.asarray(0.9)) < 1.


def test_channel_profile():
    np.testing.assert_allclose(channel_profile(jnp.asarray([0., 1.])), [0., 0.])
    np.testing.assert_allclose(channel_profile(jnp.asarray(0.5)), 0.125)


@pytest.mark.parametrize('x_mode', ['dirichlet_ends', 'periodic'])
def test_random_admissible_field(x_mode):
    grid = build_grid(PhysicalParams(alpha=1., beta=1.), 2, 32, 16, x_mode)
    field = random_admissible_field(random.PRNGKey(42), grid)
    assert field.u.shape == (grid.nux, grid.ny)
    assert field.v.shape == (grid.nx, grid.ny + 1)
    assert field.g.shape == (grid.nux,)
    np.testing.assert_allclose(divergence(field, grid), 0., atol=1e-10)
    np.testing.assert_allclose(field.v[:, 0], 0.)
    np.testing.assert_allclose(field.v[:, -1], 0.)
    if x_mode == 'dirichlet_ends':
        np.testing.assert_allclose(field.u[0], 0.)
        np.testing.assert_allclose(field.u[-1], 0.)
        np.testing.assert_allclose(field.g[jnp.array([0, -1])], 0.)
    assert float(jnp.sum(field.u ** 2)) > 0.


def test_random_admissible_fields_reproducible():
    grid = build_grid(PhysicalParams(alpha=1., beta=1.), 2, 32, 16)
    a = random_admissible_fields(random.PRNGKey(0), grid, 5)
    b = random_admissible_fields(random.PRNGKey(0), grid, 5)
    assert a.u.shape == (5, grid.nux, grid.ny)
    np.testing.assert_array_equal(a.u, b.u)
    # distinct members
    assert float(jnp.max(jnp.abs(a.u[0] - a.u[1]))) > 0.
