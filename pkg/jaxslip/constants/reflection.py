import jax
import numpy as np
from jax import numpy as jnp

from jaxslip.core.fields import check_field, grad_sq, symgrad_sq
from jaxslip.core.grid import quadrature_weights
from jaxslip.internals.types import Field, Grid, ReflectionExtension, FloatArray

__all__ = [
    'extended_grid',
    'reflect_field',
    'extension_ratios',
    'extend_by_reflection'
]

_D_BOUND = 4.
_L2_BOUND = 4.
_W12_BOUND = 64.


def extended_grid(grid: Grid) -> Grid:
    """
    Grid of the strip (-1, 1) shifted to (0, 2), with the original slip wall in the middle.
    """
    return grid._replace(ny=2 * grid.ny, height=2. * grid.height)


def reflect_field(field: Field) -> Field:
    """
    Even mirror of both components across the slip wall. The mirrored field vanishes on both walls of the
    extended strip, so its wall trace is zero.
    """
    u = jnp.concatenate([jnp.flip(field.u, axis=-1), field.u], axis=-1)
    v = jnp.concatenate([jnp.flip(field.v[..., 1:], axis=-1), field.v], axis=-1)
    return Field(u=u, v=v, g=jnp.zeros_like(field.g))


def _l2_sq(field: Field, grid: Grid) -> FloatArray:
    weights = quadrature_weights(grid)
    return jnp.sum(weights['u'] * field.u ** 2) + jnp.sum(weights['v'] * field.v ** 2)


def _safe_ratio(numerator: FloatArray, denominator: FloatArray) -> FloatArray:
    return jnp.where(denominator > 0., numerator / jnp.where(denominator > 0., denominator, 1.), 0.)


def extension_ratios(field: Field, grid: Grid):
    """
    The three extension ratios ||D Eu||^2/||Du||^2, ||Eu||^2/||u||^2 and ||Eu||_{W12}^2/||Du||^2 (zero for a
    zero field). Traceable, so it can be mapped over a stack of fields.
    """
    big_grid = extended_grid(grid)
    extended = reflect_field(field)
    d_sq = symgrad_sq(field, grid)
    l2_sq = _l2_sq(field, grid)
    ext_l2_sq = _l2_sq(extended, big_grid)
    return (_safe_ratio(symgrad_sq(extended, big_grid), d_sq),
            _safe_ratio(ext_l2_sq, l2_sq),
            _safe_ratio(ext_l2_sq + grad_sq(extended, big_grid), d_sq))


def extend_by_reflection(field: Field, grid: Grid, tol: float = 1e-12) -> ReflectionExtension:
    """
    Extend a field from the channel to the strip (-1, 1) by even reflection across the slip wall and check the
    extension estimates ||D Eu||^2 <= 4 ||Du||^2, ||Eu||^2 <= 4 ||u||^2 and ||Eu||_{W12}^2 <= 64 ||Du||^2.

    Args:
        field: field on the channel
        grid: its grid
        tol: threshold for a nonvanishing wall or end trace

    Returns:
        ReflectionExtension with the extended field and grid

    Raises:
        ValueError: if the field does not vanish on the top wall, or on the end faces in dirichlet_ends mode.
    """
    check_field(field, grid)
    scale = max(1., float(jnp.max(jnp.abs(field.u))), float(jnp.max(jnp.abs(field.v))))
    if float(jnp.max(jnp.abs(field.v[:, -1]))) > tol * scale or float(jnp.max(jnp.abs(field.v[:, 0]))) > tol * scale:
        raise ValueError("Expected a field with vanishing normal trace on the walls (nonvanishing top trace).")
    if not grid.periodic:
        ends = np.concatenate([np.asarray(field.u[0]), np.asarray(field.u[-1]), np.asarray(field.g[jnp.array([0, -1])])])
        if np.max(np.abs(ends)) > tol * scale:
            raise ValueError("Expected a field vanishing on the end faces.")
    d_ratio, l2_ratio, w12_ratio = (float(r) for r in jax.jit(extension_ratios, static_argnums=1)(field, grid))
    holds = d_ratio <= _D_BOUND * (1. + 1e-10) and l2_ratio <= _L2_BOUND * (1. + 1e-10) \
            and w12_ratio <= _W12_BOUND * (1. + 1e-10)
    return ReflectionExtension(field=reflect_field(field), grid=extended_grid(grid), d_ratio=d_ratio,
                               l2_ratio=l2_ratio, w12_ratio=w12_ratio, holds=holds)
