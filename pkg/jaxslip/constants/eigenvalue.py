import numpy as np
from scipy import sparse
from scipy.optimize import brentq
from scipy.sparse.linalg import eigsh, ArpackNoConvergence

from jaxslip.errors import ConvergenceError
from jaxslip.internals.logging import logger
from jaxslip.internals.types import EigenResult, DiscreteEigenResult, Grid

__all__ = [
    'boundary_eigenvalue_mu',
    'capital_lambda',
    'korn_constant',
    'discrete_lambda_sq'
]

_BRACKET = (0.5 * np.pi, np.pi)


def _check_alpha(alpha: float):
    if np.isnan(alpha) or alpha < 0.:
        raise ValueError(f"Expected alpha >= 0, got alpha={alpha}.")


def _mu_residual(mu: float, alpha: float) -> float:
    # normalised so that it stays O(1) for large alpha
    return (mu * np.cos(mu) + 8. * alpha * np.sin(mu)) / (1. + 8. * alpha)


def boundary_eigenvalue_mu(alpha: float) -> EigenResult:
    """
    Smallest positive root of mu cos(mu) + 8 alpha sin(mu) = 0, which lies in [pi/2, pi] for every alpha >= 0.

    Args:
        alpha: slip coefficient, alpha = inf gives the no-slip limit mu = pi

    Returns:
        EigenResult with lambda_sq = mu^2 and the normalised residual
        |mu cos mu + 8 alpha sin mu| / (1 + 8 alpha).
    """
    alpha = float(alpha)
    _check_alpha(alpha)
    if np.isinf(alpha):
        mu = np.pi
        residual = 0.
    elif alpha == 0.:
        mu = 0.5 * np.pi
        residual = 0.
    else:
        mu = brentq(_mu_residual, *_BRACKET, args=(alpha,), xtol=1e-14, rtol=4. * np.finfo(float).eps,
                    maxiter=200)
        residual = abs(_mu_residual(mu, alpha))
    return EigenResult(mu=float(mu), lambda_sq=float(mu ** 2), bracket=_BRACKET, residual=float(residual))


def capital_lambda(alpha: float, beta: float, L: float = 1.) -> float:
    """
    Norm-equivalence constant Lambda = 32 L^2 / pi^2 + beta min(1/alpha, 8 L), so that ||u||_H^2 <= Lambda ||u||_V^2.
    beta = 0 and alpha = inf are accepted as limits.
    """
    alpha = float(alpha)
    _check_alpha(alpha)
    if not beta >= 0.:
        raise ValueError(f"Expected beta >= 0, got beta={beta}.")
    if not L > 0.:
        raise ValueError(f"Expected L > 0, got L={L}.")
    inverse_alpha = np.inf if alpha == 0. else 1. / alpha
    return float(32. * L ** 2 / np.pi ** 2 + beta * min(inverse_alpha, 8. * L))


def korn_constant(L: float = 1.) -> float:
    """Constant of ||u||_{W12}^2 <= 8 (1 + 4 L^2 / pi^2) ||u||_V^2."""
    if not L > 0.:
        raise ValueError(f"Expected L > 0, got L={L}.")
    return float(8. * (1. + 4. * L ** 2 / np.pi ** 2))


def _second_difference(n: int, spacing: float, low: float, high: float, periodic: bool = False) -> sparse.csr_matrix:
    """
    Matrix of the quadratic form sum (w_{i+1} - w_i)^2 / spacing + low w_0^2 + high w_{n-1}^2 on cell-centred
    values, or its wrapped version.
    """
    main = np.full(n, 2. / spacing)
    off = np.full(n - 1, -1. / spacing)
    matrix = sparse.diags([off, main, off], [-1, 0, 1], format='lil')
    if periodic:
        matrix[0, n - 1] = matrix[n - 1, 0] = -1. / spacing
    else:
        matrix[0, 0] = 1. / spacing + low
        matrix[n - 1, n - 1] = 1. / spacing + high
    return matrix.tocsr()


def discrete_lambda_sq(alpha: float, grid: Grid) -> DiscreteEigenResult:
    """
    Smallest discrete Rayleigh quotient (||grad w||^2 + 8 alpha ||w||_Gamma^2) / ||w||^2 over scalar functions on the
    truncated strip that vanish on the top wall (and on the ends in dirichlet_ends mode).

    The wall value is eliminated exactly: minimising (w_0 - g)^2 (2/dy) + 8 alpha g^2 over g leaves a Robin term with
    coefficient ab/(a + b), a = 2/dy, b = 8 alpha. The operator is separable, so the x part (a truncation shift that
    vanishes as n_trunc grows) and the cross-channel part are reported separately.

    Args:
        alpha: slip coefficient, inf for the Dirichlet case
        grid: the grid, ny >= 16

    Returns:
        DiscreteEigenResult

    Raises:
        ValueError: if the grid is too coarse or alpha < 0.
        ConvergenceError: if the eigensolver fails.
    """
    alpha = float(alpha)
    _check_alpha(alpha)
    if grid.ny < 16:
        raise ValueError(f"Expected ny >= 16, got ny={grid.ny}.")
    a = 2. / grid.dy
    robin = a if np.isinf(alpha) else a * 8. * alpha / (a + 8. * alpha)
    stiffness_y = _second_difference(grid.ny, grid.dy, robin, a)
    stiffness_x = _second_difference(grid.nx, grid.dx, 2. / grid.dx, 2. / grid.dx, periodic=grid.periodic)
    # mass is dx dy I
    operator = (sparse.kron(stiffness_x / grid.dx, sparse.identity(grid.ny))
                + sparse.kron(sparse.identity(grid.nx), stiffness_y / grid.dy)).tocsc()
    try:
        values = eigsh(operator, k=1, sigma=0., which='LM', return_eigenvectors=False, tol=1e-12)
    except ArpackNoConvergence as e:
        raise ConvergenceError("Eigensolver did not converge", float('nan')) from e
    lambda_sq = float(np.min(values))
    lambda_x = float(np.linalg.eigvalsh(stiffness_x.toarray() / grid.dx)[0])
    lambda_y = float(np.linalg.eigvalsh(stiffness_y.toarray() / grid.dy)[0])
    mismatch = abs(lambda_sq - lambda_x - lambda_y)
    if mismatch > 1e-8 * max(1., lambda_sq):
        raise ConvergenceError("Eigensolver disagrees with the separable decomposition", mismatch)
    logger.info(f"Discrete lambda^2 for alpha={alpha}: {lambda_sq:.6f} (x shift {lambda_x:.3e}, y part {lambda_y:.6f})")
    return DiscreteEigenResult(alpha=alpha, lambda_sq=lambda_sq, lambda_sq_y=lambda_y,
                               truncation_shift=max(lambda_x, 0.), n_trunc=grid.n_trunc, ny=grid.ny)
