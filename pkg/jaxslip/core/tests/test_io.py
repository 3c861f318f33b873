import numpy as np
import pytest
from jax import random

from jaxslip.core.fields import state_from_field
from jaxslip.core.grid import build_grid
from jaxslip.core.io import save_field, load_field, write_field_csv
from jaxslip.internals.random import random_admissible_field
from jaxslip.internals.types import PhysicalParams


@pytest.mark.parametrize('x_mode', ['dirichlet_ends', 'periodic'])
def test_binary_round_trip(tmp_path, x_mode):
    grid = build_grid(PhysicalParams(alpha=1., beta=1.), 2, 16, 8, x_mode)
    state = state_from_field(random_admissible_field(random.PRNGKey(1), grid), grid, t=0.25)
    state = state._replace(p=np.arange(grid.nx * grid.ny, dtype=float).reshape((grid.nx, grid.ny)))
    path = tmp_path / 'state.bin'
    save_field(path, state, grid)
    loaded, loaded_grid = load_field(path)
    assert loaded_grid == grid
    np.testing.assert_array_equal(loaded.u, state.u)
    np.testing.assert_array_equal(loaded.v, state.v)
    np.testing.assert_array_equal(loaded.g, state.g)
    np.testing.assert_array_equal(loaded.p, state.p)
    assert float(loaded.t) == 0.25


def test_load_truncated_file(tmp_path):
    path = tmp_path / 'bad.bin'
    np.zeros(3).tofile(path)
    with pytest.raises(ValueError):
        load_field(path)


def test_field_csv(tmp_path):
    grid = build_grid(PhysicalParams(alpha=1., beta=1.), 1, 8, 4)
    state = state_from_field(random_admissible_field(random.PRNGKey(2), grid), grid)
    path = tmp_path / 'state.csv'
    write_field_csv(path, state, grid)
    table = np.loadtxt(path, delimiter=',', skiprows=1)
    assert table.shape == (grid.nx * grid.ny, 5)
    with open(path) as fp:
        assert fp.readline().strip() == 'x,y,u,v,p'
