from typing import Optional

import numpy as np

from jaxslip.constants.eigenvalue import capital_lambda
from jaxslip.internals.types import PhysicalParams, DimensionBound

__all__ = [
    'DEFAULT_KAPPA',
    'dimension_bound',
    'dimension_bound_nondimensional'
]

# Lieb-Thirring constant of the Dirichlet-orthonormal case
DEFAULT_KAPPA = 1. / (2. * np.sqrt(3.))


def _check(params: PhysicalParams, kappa: float, forcing_h_norm: float):
    if not kappa > 0.:
        raise ValueError(f"Expected kappa > 0, got kappa={kappa}.")
    if not forcing_h_norm >= 0.:
        raise ValueError(f"Expected forcing_h_norm >= 0, got {forcing_h_norm}.")
    if not params.nu > 0.:
        raise ValueError(f"Expected nu > 0, got nu={params.nu}.")


def dimension_bound(params: PhysicalParams, kappa: float = DEFAULT_KAPPA, forcing_h_norm: float = 1.,
                    forcing_l2_norm: Optional[float] = None) -> DimensionBound:
    """
    Upper bound on the fractal dimension of the global attractor,

        (8 kappa / nu^4) Lambda^2 ||(f, h)||_{H_L}^2,  Lambda = 32 L^2 / pi^2 + beta min(1/alpha, 8 L),

    with the no-slip comparison value (1 / (4 sqrt(3) nu^4)) (L^4 / pi^4) ||f||^2.

    Args:
        params: physical parameters; beta = 0 and alpha = inf are accepted as limits
        kappa: Lieb-Thirring constant
        forcing_h_norm: ||(f, h)||_{H_L}
        forcing_l2_norm: ||f||_{L2}, for the comparison value; defaults to forcing_h_norm

    Returns:
        DimensionBound
    """
    _check(params, kappa, forcing_h_norm)
    if forcing_l2_norm is None:
        forcing_l2_norm = forcing_h_norm
    lambda_cap = capital_lambda(params.alpha, params.beta, params.L)
    bound = 8. * kappa / params.nu ** 4 * lambda_cap ** 2 * forcing_h_norm ** 2
    reference = params.L ** 4 / (4. * np.sqrt(3.) * params.nu ** 4 * np.pi ** 4) * forcing_l2_norm ** 2
    return DimensionBound(kappa=float(kappa), lambda_cap=lambda_cap, forcing_h_norm=float(forcing_h_norm),
                          bound=float(bound), dirichlet_reference=float(reference))


def dimension_bound_nondimensional(params: PhysicalParams, kappa: float = DEFAULT_KAPPA, forcing_h_norm: float = 1.,
                                   forcing_l2_norm: Optional[float] = None) -> DimensionBound:
    """
    The same bound evaluated in scaled variables: Lambda(alpha L, beta / L, 1) and
    ||(f*, h*)||_H^2 = (L^4 / nu^4) ||(f, h)||_{H_L}^2. Agrees with `dimension_bound` up to roundoff.
    The returned lambda_cap and forcing norm are the scaled ones.
    """
    _check(params, kappa, forcing_h_norm)
    if forcing_l2_norm is None:
        forcing_l2_norm = forcing_h_norm
    factor = params.L ** 2 / params.nu ** 2
    scaled = PhysicalParams(alpha=params.alpha * params.L, beta=params.beta / params.L, nu=1., L=1.,
                            T=params.nu * params.T / params.L ** 2)
    return dimension_bound(scaled, kappa, factor * forcing_h_norm, factor * forcing_l2_norm)
