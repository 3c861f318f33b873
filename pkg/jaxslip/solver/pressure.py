import numpy as np
from jax import numpy as jnp
from jax.scipy.sparse.linalg import cg

from jaxslip.core.fields import divergence, pressure_gradient
from jaxslip.internals.types import Grid, FloatArray, Field, PRESSURE_SOLVERS

__all__ = [
    'PressureSolver'
]


def _second_difference(n: int, spacing: float, periodic: bool) -> np.ndarray:
    # -d^2/dx^2 with zero-flux ends, or wrapped
    matrix = 2. * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    if periodic:
        matrix[0, -1] = matrix[-1, 0] = -1.
    else:
        matrix[0, 0] = matrix[-1, -1] = 1.
    return matrix / spacing ** 2


class PressureSolver:
    """
    Solves div grad p = rhs with zero-flux walls (and wrapped ends in periodic mode) for mean-zero p.

    The default method diagonalises the separable operator once (eigenvectors of the 1D second differences in x
    and y) and applies the inverse with two dense transforms per solve. The 'cg' method iterates on the
    matrix-free operator instead.
    """

    def __init__(self, grid: Grid, method: str = 'diagonalisation', tol: float = 1e-12, maxiter: int = 5000):
        if method not in PRESSURE_SOLVERS:
            raise ValueError(f"Invalid pressure solver {method}, expected one of {PRESSURE_SOLVERS}.")
        self.grid = grid
        self.method = method
        self.tol = tol
        self.maxiter = maxiter
        # relative Poisson residual above which a solve counts as failed
        self.residual_tol = max(float(np.sqrt(tol)), 1e-8)
        eig_x, vec_x = np.linalg.eigh(_second_difference(grid.nx, grid.dx, grid.periodic))
        eig_y, vec_y = np.linalg.eigh(_second_difference(grid.ny, grid.dy, False))
        eigenvalues = eig_x[:, None] + eig_y[None, :]
        null = eigenvalues < 1e-9 * eigenvalues.max()
        self._vec_x = jnp.asarray(vec_x)
        self._vec_y = jnp.asarray(vec_y)
        self._inverse = jnp.asarray(np.where(null, 0., -1. / np.where(null, 1., eigenvalues)))

    def laplacian(self, p: FloatArray) -> FloatArray:
        return divergence(pressure_gradient(p, self.grid), self.grid)

    def solve(self, rhs: FloatArray) -> FloatArray:
        rhs = rhs - jnp.mean(rhs)
        if self.method == 'diagonalisation':
            coefficients = self._vec_x.T @ rhs @ self._vec_y
            return self._vec_x @ (self._inverse * coefficients) @ self._vec_y.T
        # negative semi-definite operator, solve the positive version
        p, _ = cg(lambda q: -self.laplacian(q), -rhs, tol=self.tol, atol=0., maxiter=self.maxiter)
        return p - jnp.mean(p)

    def relative_residual(self, p: FloatArray, rhs: FloatArray) -> FloatArray:
        """
        ||div grad p - rhs|| / ||rhs|| on the mean-free part of rhs, 0 for a mean-free zero right-hand side.
        """
        rhs = rhs - jnp.mean(rhs)
        size = jnp.sqrt(jnp.sum(rhs ** 2))
        error = jnp.sqrt(jnp.sum((self.laplacian(p) - rhs) ** 2))
        return jnp.where(size > 0., error / jnp.where(size > 0., size, 1.), 0.)

    def project(self, field: Field, dt: FloatArray):
        """
        Remove the gradient part of a field.

        Returns:
            the projected field, the pressure p with field - dt grad p divergence-free, and the relative residual
            of the pressure solve
        """
        rhs = divergence(field, self.grid) / dt
        p = self.solve(rhs)
        correction = pressure_gradient(p, self.grid)
        projected = Field(u=field.u - dt * correction.u, v=field.v - dt * correction.v, g=field.g)
        return projected, p, self.relative_residual(p, rhs)
