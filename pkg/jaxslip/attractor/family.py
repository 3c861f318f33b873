from typing import Optional

import jax
import numpy as np
import scipy.linalg
from jax import random, numpy as jnp

from jaxslip.core.fields import zero_field
from jaxslip.core.grid import quadrature_weights
from jaxslip.internals.random import random_admissible_fields
from jaxslip.internals.types import Field, Grid, TangentFamily, Laws, FloatArray, PRNGKey
from jaxslip.solver.operators import dissipation

__all__ = [
    'h_gram',
    'orthonormal_transform',
    'h_orthonormalize_half',
    'random_family',
    'stream_function_basis',
    'stokes_modes'
]

MAX_STOKES_DIM = 4000


def h_gram(fields: Field, beta: FloatArray, grid: Grid) -> FloatArray:
    """
    Gram matrix (phi_i, phi_j)_H of a stack of fields, [N, N].
    """
    weights = quadrature_weights(grid)
    mass = Field(u=weights['u'], v=weights['v'], g=beta * weights['g'])
    return sum(jnp.einsum('i...,j...->ij', phi * m, phi) for phi, m in zip(fields, mass))


def orthonormal_transform(fields: Field, beta: float, grid: Grid, rank_tol: float = 1e-12) -> np.ndarray:
    """
    Lower-triangular T with (T phi) H-orthonormal, found by two passes of Cholesky orthonormalisation
    (equivalent to Gram-Schmidt in the H inner product).

    Raises:
        ValueError: if the fields are numerically dependent in H.
    """
    num = int(fields.u.shape[0])
    transform = np.eye(num)
    current = fields
    for _ in range(2):
        gram = np.asarray(h_gram(current, beta, grid))
        gram = 0.5 * (gram + gram.T)
        scale = max(float(np.max(np.diag(gram))), np.finfo(float).tiny)
        try:
            chol = np.linalg.cholesky(gram)
        except np.linalg.LinAlgError:
            raise ValueError(f"Family of {num} fields is rank deficient in H.")
        if np.min(np.diag(chol)) ** 2 <= rank_tol * scale:
            raise ValueError(f"Family of {num} fields is rank deficient in H.")
        step = scipy.linalg.solve_triangular(chol, np.eye(num), lower=True)
        transform = step @ transform
        current = jax.tree.map(lambda x: jnp.tensordot(jnp.asarray(step), x, axes=1), current)
    return transform


def h_orthonormalize_half(fields: Field, beta: float, grid: Grid) -> TangentFamily:
    """
    Orthonormalise a stack of fields in H and scale by 1/sqrt(2), so that (phi_i, phi_j)_H = delta_ij / 2.

    Args:
        fields: stack with leading dimension N
        beta: wall inertia coefficient of the H inner product
        grid: the grid

    Returns:
        TangentFamily

    Raises:
        ValueError: on rank deficiency.
    """
    transform = jnp.asarray(orthonormal_transform(fields, beta, grid)) / np.sqrt(2.)
    phis = jax.tree.map(lambda x: jnp.tensordot(transform, x, axes=1), fields)
    return TangentFamily(phis=phis, N=int(transform.shape[0]))


def random_family(key: PRNGKey, N: int, beta: float, grid: Grid) -> TangentFamily:
    """N random admissible fields, orthonormalised with factor 1/2."""
    if N < 1:
        raise ValueError(f"Expected N >= 1, got N={N}.")
    return h_orthonormalize_half(random_admissible_fields(key, grid, N), beta, grid)


def _curl(psi: FloatArray, grid: Grid) -> Field:
    # corner stream function -> face velocities
    u = (psi[:, 1:] - psi[:, :-1]) / grid.dy
    if grid.periodic:
        v = -(jnp.roll(psi, -1, axis=0) - psi) / grid.dx
    else:
        v = -(psi[1:] - psi[:-1]) / grid.dx
    return Field(u=u, v=v, g=jnp.zeros((grid.nux,), psi.dtype))


def stream_function_basis(grid: Grid, with_trace: bool = True) -> Field:
    """
    Basis of the discretely divergence-free admissible fields: curls of unit corner stream functions (zero on the
    walls and ends; in periodic mode plus one uniform-flux function), followed by unit slip values on the free
    wall nodes.

    Returns:
        stack of fields with leading dimension equal to the dimension of the space
    """
    num_x = grid.nux
    if grid.periodic:
        columns = np.arange(num_x)
    else:
        columns = np.arange(1, num_x - 1)
    rows = np.arange(1, grid.ny)
    ii, jj = np.meshgrid(columns, rows, indexing='ij')
    num_psi = ii.size
    flat_i = jnp.asarray(ii.ravel())
    flat_j = jnp.asarray(jj.ravel())

    def psi_field(k):
        psi = jnp.zeros((num_x, grid.ny + 1)).at[flat_i[k], flat_j[k]].set(1.)
        return _curl(psi, grid)

    fields = [jax.vmap(psi_field)(jnp.arange(num_psi))]
    if grid.periodic:
        flux = jnp.zeros((num_x, grid.ny + 1)).at[:, -1].set(1.)
        fields.append(jax.tree.map(lambda x: x[None], _curl(flux, grid)))
    if with_trace:
        zero = zero_field(grid)
        traces = jnp.eye(num_x)[columns]
        fields.append(Field(u=jnp.broadcast_to(zero.u, (columns.size,) + zero.u.shape),
                            v=jnp.broadcast_to(zero.v, (columns.size,) + zero.v.shape), g=traces))
    return jax.tree.map(lambda *xs: jnp.concatenate(xs, axis=0), *fields)


def stokes_modes(laws: Laws, alpha: float, beta: float, grid: Grid, N: int,
                 max_dim: Optional[int] = MAX_STOKES_DIM) -> TangentFamily:
    """
    Leading N eigenfunctions of the discrete Stokes operator with the dynamic slip wall, linearised about the rest
    state: the smallest generalized eigenpairs of (A'(0), M) on the divergence-free subspace. With beta = 0 the slip
    values carry no mass and are left out of the basis.

    Raises:
        ValueError: if N exceeds the subspace dimension or the subspace is larger than max_dim.
    """
    basis = stream_function_basis(grid, with_trace=beta > 0.)
    dim = int(basis.u.shape[0])
    if max_dim is not None and dim > max_dim:
        raise ValueError(f"Divergence-free subspace of dimension {dim} exceeds max_dim={max_dim}.")
    if not 1 <= N <= dim:
        raise ValueError(f"Expected 1 <= N <= {dim}, got N={N}.")
    zero = zero_field(grid)

    def apply(phi):
        return jax.jvp(lambda f: dissipation(laws, alpha, f, grid), (zero,), (phi,))[1]

    applied = jax.jit(jax.vmap(apply))(basis)
    stiffness = np.asarray(sum(jnp.einsum('a...,b...->ab', x, y) for x, y in zip(basis, applied)))
    stiffness = 0.5 * (stiffness + stiffness.T)
    mass = np.asarray(h_gram(basis, beta, grid))
    mass = 0.5 * (mass + mass.T)
    _, vectors = scipy.linalg.eigh(stiffness, mass, subset_by_index=[0, N - 1])
    modes = jax.tree.map(lambda x: jnp.tensordot(jnp.asarray(vectors.T), x, axes=1), basis)
    return h_orthonormalize_half(modes, beta, grid)
