import numpy as np
from jax import numpy as jnp

from jaxslip.internals.types import PhysicalParams, Grid, X_MODES, float_type

__all__ = [
    'check_params',
    'build_grid',
    'x_faces',
    'x_centres',
    'y_faces',
    'y_centres',
    'velocity_masks',
    'quadrature_weights'
]


def check_params(params: PhysicalParams, allow_zero_beta: bool = False):
    """
    Validate physical parameters.

    Raises:
        ValueError: if any parameter is not strictly positive.
    """
    for name in ('alpha', 'nu', 'L', 'T'):
        value = getattr(params, name)
        if not value > 0:
            raise ValueError(f"Expected {name} > 0, got {name}={value}.")
    if allow_zero_beta:
        if not params.beta >= 0:
            raise ValueError(f"Expected beta >= 0, got beta={params.beta}.")
    elif not params.beta > 0:
        raise ValueError(f"Expected beta > 0, got beta={params.beta}.")


def build_grid(params: PhysicalParams, n_trunc: int, nx: int, ny: int, x_mode: str = 'dirichlet_ends') -> Grid:
    """
    Build the staggered grid of the truncated channel (-n_trunc, n_trunc) x (0, 1), in nondimensional units.

    Args:
        params: physical parameters, validated here
        n_trunc: half-length of the truncated channel
        nx: cells in x
        ny: cells in y
        x_mode: 'dirichlet_ends' or 'periodic'

    Returns:
        the grid

    Raises:
        ValueError: if the grid is too coarse or sizes are not positive.
    """
    check_params(params, allow_zero_beta=True)
    if int(n_trunc) != n_trunc or n_trunc < 1:
        raise ValueError(f"Expected integer n_trunc >= 1, got n_trunc={n_trunc}.")
    if nx < 4 or ny < 4:
        raise ValueError(f"grid too coarse: expected nx, ny >= 4, got nx={nx}, ny={ny}.")
    if x_mode not in X_MODES:
        raise ValueError(f"Invalid x_mode {x_mode}, expected one of {X_MODES}.")
    return Grid(
        n_trunc=int(n_trunc),
        nx=int(nx),
        ny=int(ny),
        dx=2. * n_trunc / nx,
        dy=1. / ny,
        x_mode=x_mode
    )


def x_faces(grid: Grid) -> np.ndarray:
    """x-coordinates of the u-faces, [nux]."""
    return -grid.n_trunc + grid.dx * np.arange(grid.nux)


def x_centres(grid: Grid) -> np.ndarray:
    return -grid.n_trunc + grid.dx * (np.arange(grid.nx) + 0.5)


def y_faces(grid: Grid) -> np.ndarray:
    return grid.dy * np.arange(grid.ny + 1)


def y_centres(grid: Grid) -> np.ndarray:
    return grid.dy * (np.arange(grid.ny) + 0.5)


def velocity_masks(grid: Grid):
    """
    Masks of the free degrees of freedom. Wall rows of v are always fixed, the end faces of u and g only in
    dirichlet_ends mode.

    Returns:
        (mask_u [nux, ny], mask_v [nx, ny + 1], mask_g [nux])
    """
    mask_x = np.ones(grid.nux, float_type)
    if not grid.periodic:
        mask_x[0] = 0.
        mask_x[-1] = 0.
    mask_u = np.tile(mask_x[:, None], (1, grid.ny))
    mask_v = np.ones((grid.nx, grid.ny + 1), float_type)
    mask_v[:, 0] = 0.
    mask_v[:, -1] = 0.
    return jnp.asarray(mask_u), jnp.asarray(mask_v), jnp.asarray(mask_x)


def quadrature_weights(grid: Grid):
    """
    Trapezoid/midpoint weights consistent with the staggered layout.

    Returns:
        dict with
            'u': [nux, ny] weights of u-faces,
            'v': [nx, ny + 1] weights of v-faces,
            'g': [nux] weights of the wall trace,
            'centre': scalar weight of a cell,
            'corner': [nux, ny + 1] weights of the cell corners carrying the shear components.
    """
    cx = np.ones(grid.nux, float_type)
    if not grid.periodic:
        cx[0] = cx[-1] = 0.5
    cy = np.ones(grid.ny + 1, float_type)
    cy[0] = cy[-1] = 0.5
    area = grid.dx * grid.dy
    return dict(
        u=jnp.asarray(area * np.tile(cx[:, None], (1, grid.ny))),
        v=jnp.asarray(area * np.tile(cy[None, :], (grid.nx, 1))),
        g=jnp.asarray(grid.dx * cx),
        centre=area,
        corner=jnp.asarray(area * cx[:, None] * cy[None, :])
    )
