"""
Discrete operators of the weak formulation on the staggered grid.

All operators return "weighted" fields: entries are already multiplied by the quadrature weights, so that
sum(op(X) * Y) over leaves is the discrete integral pairing. With this convention

    dissipation(X) . X = int S(DX):DX + alpha int_Gamma s(X).X
    convection(X) . X = 0                                   (skew-symmetric form)
    mass * pressure_gradient(p) . X = -(p, div X)

hold exactly, which makes the discrete energy identity exact up to the time-discretisation error.
"""
from typing import Tuple

import jax
from jax import numpy as jnp

from jaxslip.constitutive.laws import stress_eval, slip_eval
from jaxslip.core.fields import strain
from jaxslip.core.grid import quadrature_weights
from jaxslip.internals.types import Grid, Field, Laws, FloatArray, StressLaw

__all__ = [
    'field_dot',
    'field_axpy',
    'grid_stress',
    'dissipation',
    'dissipation_power',
    'advective_form',
    'convection'
]


def field_dot(a: Field, b: Field) -> FloatArray:
    """Plain sum of elementwise products over all leaves."""
    return sum(jnp.sum(x * y) for x, y in zip(jax.tree.leaves(a), jax.tree.leaves(b)))


def field_axpy(alpha: FloatArray, x: Field, y: Field) -> Field:
    """alpha * x + y."""
    return jax.tree.map(lambda a, b: alpha * a + b, x, y)


def _corners_to_centres(k: FloatArray, grid: Grid) -> FloatArray:
    if grid.periodic:
        kx = 0.5 * (k + jnp.roll(k, -1, axis=0))
    else:
        kx = 0.5 * (k[1:] + k[:-1])
    return 0.5 * (kx[:, 1:] + kx[:, :-1])


def _centres_to_corners(c: FloatArray, grid: Grid) -> FloatArray:
    if grid.periodic:
        cx = 0.5 * (c + jnp.roll(c, 1, axis=0))
    else:
        padded = jnp.pad(c, ((1, 1), (0, 0)), mode='edge')
        cx = 0.5 * (padded[1:] + padded[:-1])
    padded = jnp.pad(cx, ((0, 0), (1, 1)), mode='edge')
    return 0.5 * (padded[:, 1:] + padded[:, :-1])


def _tensor(d11: FloatArray, d22: FloatArray, d12: FloatArray) -> FloatArray:
    return jnp.stack([jnp.stack([d11, d12], axis=-1), jnp.stack([d12, d22], axis=-1)], axis=-2)


def grid_stress(law: StressLaw, field: Field, grid: Grid) -> Tuple[FloatArray, FloatArray, FloatArray]:
    """
    Stress components where the strain components live: S11, S22 at cell centres, S12 at corners. The full
    strain tensor at each location is completed by averaging the missing components from neighbours.
    """
    d11, d22, d12 = strain(field, grid)
    if law.kind == 'linear':
        return 2. * law.nu * d11, 2. * law.nu * d22, 2. * law.nu * d12
    centre_stress = stress_eval(law, _tensor(d11, d22, _corners_to_centres(d12, grid)))
    corner_stress = stress_eval(law, _tensor(_centres_to_corners(d11, grid), _centres_to_corners(d22, grid), d12))
    return centre_stress[..., 0, 0], centre_stress[..., 1, 1], corner_stress[..., 0, 1]


def dissipation(laws: Laws, alpha: FloatArray, field: Field, grid: Grid) -> Field:
    """
    Weighted discrete form of -div S(Du) with the wall term alpha s(g): the adjoint of the strain map applied to
    the weighted stress.
    """
    weights = quadrature_weights(grid)
    s11, s22, s12 = grid_stress(laws.stress, field, grid)
    cotangent = (weights['centre'] * s11, weights['centre'] * s22, 2. * weights['corner'] * s12)
    _, strain_adjoint = jax.vjp(lambda f: strain(f, grid), field)
    (interior,) = strain_adjoint(cotangent)
    wall_velocity = jnp.stack([field.g, jnp.zeros_like(field.g)], axis=-1)
    wall = alpha * weights['g'] * slip_eval(laws.slip, wall_velocity)[..., 0]
    return interior._replace(g=interior.g + wall)


def dissipation_power(laws: Laws, alpha: FloatArray, field: Field, grid: Grid) -> FloatArray:
    """int S(Du):Du + alpha int_Gamma s(u).u, equal to 2 nu ||u||_V^2 for the linear laws."""
    return field_dot(dissipation(laws, alpha, field, grid), field)


def _avg_faces_to_centres_x(a, grid):
    if grid.periodic:
        return 0.5 * (a + jnp.roll(a, -1, axis=0))
    return 0.5 * (a[1:] + a[:-1])


def _avg_centres_to_faces_x(a, grid):
    # zero beyond the end walls
    if grid.periodic:
        return 0.5 * (a + jnp.roll(a, 1, axis=0))
    padded = jnp.pad(a, ((1, 1), (0, 0)))
    return 0.5 * (padded[1:] + padded[:-1])


def _avg_centres_to_faces_y(a):
    padded = jnp.pad(a, ((0, 0), (1, 1)))
    return 0.5 * (padded[:, 1:] + padded[:, :-1])


def _diff_centres_to_faces_x(a, grid):
    if grid.periodic:
        return (a - jnp.roll(a, 1, axis=0)) / grid.dx
    return jnp.pad(a[1:] - a[:-1], ((1, 1), (0, 0))) / grid.dx


def _diff_faces_to_centres_x(a, grid):
    if grid.periodic:
        return (jnp.roll(a, -1, axis=0) - a) / grid.dx
    return (a[1:] - a[:-1]) / grid.dx


def advective_form(a: Field, w: Field, phi: Field, grid: Grid) -> FloatArray:
    """
    Trilinear form b(a, w, phi) = int div(a (x) w) . phi in flux form. Wall fluxes vanish since a.v = 0 on the
    walls and a.u = 0 on the end faces.
    """
    weights = quadrature_weights(grid)
    # x-momentum on u-faces
    flux_xx = _avg_faces_to_centres_x(a.u, grid) * _avg_faces_to_centres_x(w.u, grid)
    flux_xy = _avg_centres_to_faces_x(a.v, grid) * _avg_centres_to_faces_y(w.u)
    div_x = _diff_centres_to_faces_x(flux_xx, grid) + (flux_xy[:, 1:] - flux_xy[:, :-1]) / grid.dy
    # y-momentum on v-faces
    flux_yx = _avg_centres_to_faces_y(a.u) * _avg_centres_to_faces_x(w.v, grid)
    flux_yy = (0.5 * (a.v[:, 1:] + a.v[:, :-1])) * (0.5 * (w.v[:, 1:] + w.v[:, :-1]))
    div_y = (_diff_faces_to_centres_x(flux_yx, grid)
             + jnp.pad(flux_yy[:, 1:] - flux_yy[:, :-1], ((0, 0), (1, 1))) / grid.dy)
    return jnp.sum(weights['u'] * phi.u * div_x) + jnp.sum(weights['v'] * phi.v * div_y)


def convection(field: Field, grid: Grid, scheme: str) -> Field:
    """
    Weighted convective term.

    skew_symmetric: 1/2 [b(u, u, .) - b(u, ., u)], whose pairing with u vanishes identically.
    divergence_form: b(u, u, .).
    none: zero (Stokes test mode).
    """
    zero = jax.tree.map(jnp.zeros_like, field)
    if scheme == 'none':
        return zero
    conservative = jax.grad(lambda phi: advective_form(field, field, phi, grid))(zero)
    if scheme == 'divergence_form':
        return conservative
    if scheme == 'skew_symmetric':
        transposed = jax.grad(lambda phi: advective_form(field, phi, field, grid))(zero)
        return jax.tree.map(lambda c, t: 0.5 * (c - t), conservative, transposed)
    raise ValueError(f"Unknown convection scheme {scheme}.")
