import jax
import numpy as np
import pytest
from jax import random, numpy as jnp

from jaxslip.attractor.family import h_gram, h_orthonormalize_half, random_family, stream_function_basis, \
    stokes_modes
from jaxslip.constitutive.laws import linear_laws
from jaxslip.core.fields import divergence
from jaxslip.core.grid import build_grid
from jaxslip.internals.random import random_admissible_fields


def test_random_family_half_orthonormal(small_problem):
    params, grid = small_problem
    family = random_family(random.PRNGKey(0), 5, params.beta, grid)
    assert family.N == 5
    np.testing.assert_allclose(h_gram(family.phis, params.beta, grid), 0.5 * np.eye(5), atol=1e-12)
    with pytest.raises(ValueError):
        random_family(random.PRNGKey(0), 0, params.beta, grid)


def test_rank_deficient_family(small_problem):
    params, grid = small_problem
    fields = random_admissible_fields(random.PRNGKey(1), grid, 2)
    repeated = type(fields)(*(jnp.concatenate([x, x[:1]]) for x in fields))
    with pytest.raises(ValueError):
        h_orthonormalize_half(repeated, params.beta, grid)


@pytest.mark.parametrize('x_mode', ['dirichlet_ends', 'periodic'])
def test_stream_function_basis_divergence_free(small_problem, x_mode):
    params, grid = small_problem
    grid = build_grid(params, 2, 16, 8, x_mode)
    basis = stream_function_basis(grid)
    div = float(jnp.max(jnp.abs(jax.vmap(lambda f: divergence(f, grid))(basis))))
    assert div <= 1e-10
    assert basis.g.shape == (basis.u.shape[0], grid.nux)


def test_stokes_modes(small_problem):
    params, grid = small_problem
    family = stokes_modes(linear_laws(1.), params.alpha, params.beta, grid, 6)
    np.testing.assert_allclose(h_gram(family.phis, params.beta, grid), 0.5 * np.eye(6), atol=1e-10)
    assert float(jnp.max(jnp.abs(family.phis.g))) > 0.


def test_stokes_modes_without_wall_inertia(small_problem):
    params, grid = small_problem
    family = stokes_modes(linear_laws(1.), params.alpha, 0., grid, 4)
    assert float(jnp.max(jnp.abs(family.phis.g))) == 0.
    np.testing.assert_allclose(h_gram(family.phis, 0., grid), 0.5 * np.eye(4), atol=1e-10)


def test_stokes_modes_validation(small_problem):
    params, grid = small_problem
    with pytest.raises(ValueError):
        stokes_modes(linear_laws(1.), params.alpha, params.beta, grid, 0)
    with pytest.raises(ValueError):
        stokes_modes(linear_laws(1.), params.alpha, params.beta, grid, 4, max_dim=10)
