from typing import Callable, Union, Tuple

import jax
import numpy as np
from jax import numpy as jnp

from jaxslip.core.grid import velocity_masks, quadrature_weights, x_faces, x_centres, y_faces, y_centres
from jaxslip.internals.types import Grid, Field, FlowState, Forcing, NormReport, PhysicalParams, FloatArray, \
    float_type, int_type

__all__ = [
    'zero_field',
    'zero_state',
    'state_from_field',
    'check_field',
    'strain',
    'velocity_gradient',
    'symgrad_sq',
    'grad_sq',
    'divergence',
    'pressure_gradient',
    'centre_velocity',
    'h_inner',
    'compute_norms',
    'apply_masks',
    'field_from_stream_function',
    'sample_forcing'
]

AnyField = Union[Field, FlowState]


def zero_field(grid: Grid) -> Field:
    return Field(
        u=jnp.zeros((grid.nux, grid.ny), float_type),
        v=jnp.zeros((grid.nx, grid.ny + 1), float_type),
        g=jnp.zeros((grid.nux,), float_type)
    )


def state_from_field(field: Field, grid: Grid, t: FloatArray = 0.) -> FlowState:
    """
    Wrap a field into a flow state with zero pressure and empty convective history.
    """
    return FlowState(
        u=jnp.asarray(field.u, float_type),
        v=jnp.asarray(field.v, float_type),
        g=jnp.asarray(field.g, float_type),
        p=jnp.zeros((grid.nx, grid.ny), float_type),
        t=jnp.asarray(t, float_type),
        conv=zero_field(grid),
        num_steps=jnp.asarray(0, int_type)
    )


def zero_state(grid: Grid, t: FloatArray = 0.) -> FlowState:
    return state_from_field(zero_field(grid), grid, t)


def check_field(field: AnyField, grid: Grid):
    """
    Raises:
        ValueError: if the field shapes do not match the grid.
    """
    expected = dict(u=(grid.nux, grid.ny), v=(grid.nx, grid.ny + 1), g=(grid.nux,))
    for name, shape in expected.items():
        got = tuple(np.shape(getattr(field, name)))
        if got != shape:
            raise ValueError(f"Dimension mismatch for {name}: expected {shape}, got {got}.")


def apply_masks(field: Field, grid: Grid) -> Field:
    mask_u, mask_v, mask_g = velocity_masks(grid)
    return Field(u=field.u * mask_u, v=field.v * mask_v, g=field.g * mask_g)


def _ddx_faces(u: FloatArray, grid: Grid) -> FloatArray:
    # u-faces -> cell centres
    if grid.periodic:
        return (jnp.roll(u, -1, axis=0) - u) / grid.dx
    return (u[1:] - u[:-1]) / grid.dx


def _ddx_centres(v: FloatArray, grid: Grid) -> FloatArray:
    # cell-centred in x -> u-faces; v vanishes on the end walls
    if grid.periodic:
        return (v - jnp.roll(v, 1, axis=0)) / grid.dx
    padded = jnp.pad(v, ((1, 1), (0, 0)))
    inv_spacing = np.full((grid.nx + 1, 1), 1. / grid.dx)
    inv_spacing[0] = inv_spacing[-1] = 2. / grid.dx
    return (padded[1:] - padded[:-1]) * inv_spacing


def _ddy_corners(u: FloatArray, g: FloatArray, grid: Grid) -> FloatArray:
    # cell-centred in y -> horizontal faces; the wall value is g at y=0 and zero at the top
    padded = jnp.concatenate([g[:, None], u, jnp.zeros_like(u[:, :1])], axis=1)
    inv_spacing = np.full((1, grid.ny + 1), 1. / grid.dy)
    inv_spacing[0, 0] = inv_spacing[0, -1] = 2. / grid.dy
    return (padded[:, 1:] - padded[:, :-1]) * inv_spacing


def velocity_gradient(field: AnyField, grid: Grid) -> Tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """
    Discrete velocity gradient.

    Returns:
        ux [nx, ny] and vy [nx, ny] at cell centres, uy [nux, ny + 1] and vx [nux, ny + 1] at cell corners.
    """
    ux = _ddx_faces(field.u, grid)
    vy = (field.v[:, 1:] - field.v[:, :-1]) / grid.dy
    uy = _ddy_corners(field.u, field.g, grid)
    vx = _ddx_centres(field.v, grid)
    return ux, vy, uy, vx


def strain(field: AnyField, grid: Grid) -> Tuple[FloatArray, FloatArray, FloatArray]:
    """
    Symmetric gradient Du.

    Returns:
        d11, d22 at cell centres and d12 at cell corners.
    """
    ux, vy, uy, vx = velocity_gradient(field, grid)
    return ux, vy, 0.5 * (uy + vx)


def symgrad_sq(field: AnyField, grid: Grid) -> FloatArray:
    weights = quadrature_weights(grid)
    d11, d22, d12 = strain(field, grid)
    return weights['centre'] * jnp.sum(d11 ** 2 + d22 ** 2) + 2. * jnp.sum(weights['corner'] * d12 ** 2)


def grad_sq(field: AnyField, grid: Grid) -> FloatArray:
    weights = quadrature_weights(grid)
    ux, vy, uy, vx = velocity_gradient(field, grid)
    return weights['centre'] * jnp.sum(ux ** 2 + vy ** 2) + jnp.sum(weights['corner'] * (uy ** 2 + vx ** 2))


def divergence(field: AnyField, grid: Grid) -> FloatArray:
    """Discrete divergence at cell centres, [nx, ny]."""
    return _ddx_faces(field.u, grid) + (field.v[:, 1:] - field.v[:, :-1]) / grid.dy


def pressure_gradient(p: FloatArray, grid: Grid) -> Field:
    """
    Face-centred gradient of a cell-centred scalar. Vanishes on every fixed face, so it is the negative adjoint
    of `divergence` under the face weights.
    """
    if grid.periodic:
        px = (p - jnp.roll(p, 1, axis=0)) / grid.dx
    else:
        px = jnp.pad((p[1:] - p[:-1]) / grid.dx, ((1, 1), (0, 0)))
    py = jnp.pad((p[:, 1:] - p[:, :-1]) / grid.dy, ((0, 0), (1, 1)))
    return Field(u=px, v=py, g=jnp.zeros((grid.nux,), p.dtype))


def centre_velocity(field: AnyField, grid: Grid) -> Tuple[FloatArray, FloatArray]:
    if grid.periodic:
        uc = 0.5 * (field.u + jnp.roll(field.u, -1, axis=0))
    else:
        uc = 0.5 * (field.u[1:] + field.u[:-1])
    vc = 0.5 * (field.v[:, 1:] + field.v[:, :-1])
    return uc, vc


def h_inner(a: AnyField, b: AnyField, beta: FloatArray, grid: Grid) -> FloatArray:
    """
    H inner product (a, b)_H = int a.b dx dy + beta int_Gamma a_g b_g dx.
    """
    weights = quadrature_weights(grid)
    return (jnp.sum(weights['u'] * a.u * b.u) + jnp.sum(weights['v'] * a.v * b.v)
            + beta * jnp.sum(weights['g'] * a.g * b.g))


def compute_norms(field: AnyField, params: PhysicalParams, grid: Grid) -> NormReport:
    """
    All norms of a field.

    Args:
        field: a Field or FlowState
        params: supplies alpha and beta
        grid: the grid

    Returns:
        NormReport, where v_norm^2 = symgrad^2 + alpha l2_gamma^2 and h_norm^2 = l2_omega^2 + beta l2_gamma^2.

    Raises:
        ValueError: on dimension mismatch.
    """
    check_field(field, grid)
    weights = quadrature_weights(grid)
    l2_omega_sq = jnp.sum(weights['u'] * field.u ** 2) + jnp.sum(weights['v'] * field.v ** 2)
    l2_gamma_sq = jnp.sum(weights['g'] * field.g ** 2)
    symgrad = symgrad_sq(field, grid)
    uc, vc = centre_velocity(field, grid)
    l4_sq = jnp.sqrt(weights['centre'] * jnp.sum((uc ** 2 + vc ** 2) ** 2))
    return NormReport(
        l2_omega=jnp.sqrt(l2_omega_sq),
        l2_gamma=jnp.sqrt(l2_gamma_sq),
        grad_l2=jnp.sqrt(grad_sq(field, grid)),
        symgrad_l2=jnp.sqrt(symgrad),
        v_norm=jnp.sqrt(symgrad + params.alpha * l2_gamma_sq),
        h_norm=jnp.sqrt(l2_omega_sq + params.beta * l2_gamma_sq),
        l4_omega=jnp.sqrt(l4_sq)
    )


def field_from_stream_function(psi: Callable[[FloatArray, FloatArray], FloatArray], grid: Grid) -> Field:
    """
    Discretely divergence-free field from a stream function psi(x, y) (u = d psi/dy, v = -d psi/dx).

    psi must vanish on both walls (impermeability) and, in dirichlet_ends mode, near the ends. The slip trace is
    the exact wall derivative of psi, so the field is trace-linked.
    """
    xf = jnp.asarray(x_faces(grid))
    if grid.periodic:
        xf_ext = jnp.concatenate([xf, xf[-1:] + grid.dx])
    else:
        xf_ext = xf
    yf = jnp.asarray(y_faces(grid))
    psi_corner = jax.vmap(jax.vmap(psi, in_axes=(None, 0)), in_axes=(0, None))(xf_ext, yf)  # [nx + 1, ny + 1]
    u = (psi_corner[:, 1:] - psi_corner[:, :-1]) / grid.dy
    v = -(psi_corner[1:] - psi_corner[:-1]) / grid.dx
    if grid.periodic:
        u = u[:-1]
    g = jax.vmap(jax.grad(psi, argnums=1), in_axes=(0, None))(xf, jnp.asarray(0., float_type))
    return apply_masks(Field(u=u, v=v, g=g), grid)


def sample_forcing(forcing: Forcing, grid: Grid, t: FloatArray = 0., length: float = 1.) -> Field:
    """
    Sample the analytic forcing at the staggered locations.

    Args:
        forcing: the forcing
        grid: the grid, in units of `length`
        t: time at which to sample
        length: multiplies grid coordinates, so physical forcings can be sampled on a unit grid

    Returns:
        Field of (f1 on u-faces, f2 on v-faces, h on the wall).
    """
    t = jnp.asarray(t, float_type)
    xf = jnp.asarray(x_faces(grid)) * length
    xc = jnp.asarray(x_centres(grid)) * length
    yf = jnp.asarray(y_faces(grid)) * length
    yc = jnp.asarray(y_centres(grid)) * length
    zero = zero_field(grid)
    if forcing.f is None:
        fu, fv = zero.u, zero.v
    else:
        fu = jnp.broadcast_to(forcing.f(t, xf[:, None], yc[None, :])[0], zero.u.shape)
        fv = jnp.broadcast_to(forcing.f(t, xc[:, None], yf[None, :])[1], zero.v.shape)
    if forcing.h is None:
        h = zero.g
    else:
        h = jnp.broadcast_to(forcing.h(t, xf), zero.g.shape)
    return Field(u=jnp.asarray(fu, float_type), v=jnp.asarray(fv, float_type), g=jnp.asarray(h, float_type))
