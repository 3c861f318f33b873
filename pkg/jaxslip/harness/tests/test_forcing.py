import numpy as np
import pytest
from jax import numpy as jnp

from jaxslip.core.fields import sample_forcing
from jaxslip.core.grid import build_grid, x_faces
from jaxslip.core.scaling import forcing_norms
from jaxslip.harness.forcing import zero_forcing, constant_forcing, gaussian_bump_forcing, boundary_bump_forcing, \
    forcing_support, normalise_forcing
from jaxslip.internals.types import PhysicalParams


@pytest.fixture(scope='module')
def setup():
    params = PhysicalParams(alpha=1., beta=1.)
    return params, build_grid(params, 2, 32, 16)


def test_zero_forcing(setup):
    params, grid = setup
    assert float(forcing_norms(zero_forcing(), params, grid)[0]) == 0.
    assert normalise_forcing(zero_forcing(), params, grid, 0.) == zero_forcing()
    with pytest.raises(ValueError):
        normalise_forcing(zero_forcing(), params, grid, 1.)


def test_constant_forcing_norm(setup):
    params, grid = setup
    # f = (1, 0) on (-2, 2) x (0, 1), h = 1 on the wall of length 4
    h_norm, l2_norm = forcing_norms(constant_forcing(1., 0., 1.), params, grid)
    np.testing.assert_allclose(l2_norm, 2., rtol=1e-10)
    np.testing.assert_allclose(h_norm, np.sqrt(8.), rtol=1e-10)


@pytest.mark.parametrize('forcing', [constant_forcing(0.3, 0.2, 0.1), gaussian_bump_forcing(2., 0., 0.3),
                                     boundary_bump_forcing(1., 0.5, 0.2)])
def test_normalise_forcing(setup, forcing):
    params, grid = setup
    normalised = normalise_forcing(forcing, params, grid, 2.5)
    np.testing.assert_allclose(forcing_norms(normalised, params, grid)[0], 2.5, rtol=1e-10)


def test_gaussian_bump_compact_support(setup):
    _, grid = setup
    sampled = sample_forcing(gaussian_bump_forcing(1., 0., 0.25), grid)
    support = forcing_support('gaussian_bump', 0., 0.25)
    assert support == (-1., 1.)
    xf = jnp.asarray(x_faces(grid))
    outside = jnp.abs(xf) >= 1.
    assert float(jnp.max(jnp.abs(sampled.u[outside]))) == 0.
    assert float(jnp.max(jnp.abs(sampled.g))) == 0.


def test_boundary_bump_is_wall_only(setup):
    _, grid = setup
    sampled = sample_forcing(boundary_bump_forcing(1., 0., 0.25), grid)
    assert float(jnp.max(jnp.abs(sampled.u))) == 0.
    assert float(jnp.max(jnp.abs(sampled.g))) > 0.


def test_support_of_templates():
    assert forcing_support('constant', 0., 1.) is None
    assert forcing_support('zero', 0., 1.) == (0., 0.)
    with pytest.raises(ValueError):
        gaussian_bump_forcing(sigma=0.)
