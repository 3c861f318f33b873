from typing import Dict, List, Optional

import jax
import numpy as np
from jax import random, numpy as jnp

from jaxslip.constants.eigenvalue import boundary_eigenvalue_mu, capital_lambda, korn_constant
from jaxslip.constants.reflection import extension_ratios, reflect_field, extended_grid
from jaxslip.core.fields import compute_norms, h_inner
from jaxslip.core.grid import check_params
from jaxslip.internals.logging import logger
from jaxslip.internals.random import random_admissible_fields
from jaxslip.internals.types import PhysicalParams, Grid, Field, InequalityReport, TangentFamily, FloatArray

__all__ = [
    'LADYZHENSKAYA_CONSTANT',
    'inequality_ratios',
    'verify_korn_suite',
    'verify_extension_suite',
    'verify_ladyzhenskaya',
    'verify_suborthonormal'
]

LADYZHENSKAYA_CONSTANT = 16. * np.sqrt(2.)

_RTOL = 1e-10


def _safe_ratio(numerator: FloatArray, denominator: FloatArray) -> FloatArray:
    return jnp.where(denominator > 0., numerator / jnp.where(denominator > 0., denominator, 1.), 0.)


def inequality_ratios(field: Field, params: PhysicalParams, grid: Grid) -> Dict[str, FloatArray]:
    """
    Ratios of the two sides of every norm inequality on one field. All of them are invariant under u -> c u.

    Returns:
        dict with keys
            'grad_vs_symgrad': ||grad u||^2 / ||Du||^2 (bound 8),
            'l2_vs_symgrad': ||u||^2 / ||Du||^2 (bound 8),
            'trace_vs_symgrad': ||u||_Gamma^2 / ||Du||^2 (bound 8),
            'l2_vs_v': ||u||^2 / ||u||_V^2 (bound 8 / lambda^2(alpha)),
            'w12_vs_v': ||u||_{W12}^2 / ||u||_V^2 (bound 8 (1 + 4 L^2 / pi^2)),
            'h_vs_v': ||u||_H^2 / ||u||_V^2 (bound Lambda),
            'ladyzhenskaya': ||u||_{L4}^2 / (||u|| ||u||_V) (bound 16 sqrt 2).
    """
    norms = compute_norms(field, params, grid)
    symgrad_sq = norms.symgrad_l2 ** 2
    v_sq = norms.v_norm ** 2
    return dict(
        grad_vs_symgrad=_safe_ratio(norms.grad_l2 ** 2, symgrad_sq),
        l2_vs_symgrad=_safe_ratio(norms.l2_omega ** 2, symgrad_sq),
        trace_vs_symgrad=_safe_ratio(norms.l2_gamma ** 2, symgrad_sq),
        l2_vs_v=_safe_ratio(norms.l2_omega ** 2, v_sq),
        w12_vs_v=_safe_ratio(norms.l2_omega ** 2 + norms.grad_l2 ** 2, v_sq),
        h_vs_v=_safe_ratio(norms.h_norm ** 2, v_sq),
        ladyzhenskaya=_safe_ratio(norms.l4_omega ** 2, norms.l2_omega * norms.v_norm)
    )


def _report(name: str, constant: float, ratios: FloatArray) -> InequalityReport:
    ratios = np.asarray(ratios)
    worst = float(np.max(ratios)) if ratios.size > 0 else 0.
    passed = bool(worst <= constant * (1. + _RTOL))
    if not passed:
        logger.info(f"Inequality {name} violated: worst ratio {worst:.6g} > {constant:.6g}.")
    return InequalityReport(name=name, analytic_constant=float(constant), worst_observed_ratio=worst,
                            sample_count=int(ratios.size), passed=passed)


def _sample_fields(grid: Grid, sample_count: int, seed: int) -> Field:
    if sample_count < 1:
        raise ValueError(f"Expected sample_count >= 1, got {sample_count}.")
    return random_admissible_fields(random.PRNGKey(seed), grid, sample_count)


def verify_korn_suite(params: PhysicalParams, grid: Grid, sample_count: int = 200, seed: int = 0,
                      fields: Optional[Field] = None) -> List[InequalityReport]:
    """
    Check the Korn-type inequalities over random admissible fields:

        (a) ||grad u||^2 <= 8 ||Du||^2
        (b) ||u||^2 <= 8 ||Du||^2
        (c) ||u||_Gamma^2 <= 8 ||Du||^2
        (d) ||u||^2 <= (8 / lambda^2(alpha)) ||u||_V^2
        (e) ||u||_{W12}^2 <= 8 (1 + 4 L^2 / pi^2) ||u||_V^2
        (f) ||u||_H^2 <= Lambda ||u||_V^2

    Args:
        params: parameters of the (nondimensional) channel
        grid: grid
        sample_count: number of random fields
        seed: seed
        fields: optional stack of fields to use instead of random ones

    Returns:
        one InequalityReport per inequality
    """
    check_params(params, allow_zero_beta=True)
    if fields is None:
        fields = _sample_fields(grid, sample_count, seed)
    ratios = jax.jit(jax.vmap(lambda f: inequality_ratios(f, params, grid)))(fields)
    lambda_sq = boundary_eigenvalue_mu(params.alpha).lambda_sq
    return [
        _report('grad_vs_symgrad', 8., ratios['grad_vs_symgrad']),
        _report('l2_vs_symgrad', 8., ratios['l2_vs_symgrad']),
        _report('trace_vs_symgrad', 8., ratios['trace_vs_symgrad']),
        _report('l2_vs_v', 8. / lambda_sq, ratios['l2_vs_v']),
        _report('w12_vs_v', korn_constant(params.L), ratios['w12_vs_v']),
        _report('h_vs_v', capital_lambda(params.alpha, params.beta, params.L), ratios['h_vs_v'])
    ]


def verify_extension_suite(grid: Grid, sample_count: int = 200, seed: int = 0,
                           fields: Optional[Field] = None) -> List[InequalityReport]:
    """
    Check the reflection-extension estimates ||D Eu||^2 <= 4 ||Du||^2, ||Eu||^2 <= 4 ||u||^2 and
    ||Eu||_{W12}^2 <= 64 ||Du||^2 over random admissible fields.
    """
    if fields is None:
        fields = _sample_fields(grid, sample_count, seed)
    d_ratio, l2_ratio, w12_ratio = jax.jit(jax.vmap(lambda f: extension_ratios(f, grid)))(fields)
    return [
        _report('extension_symgrad', 4., d_ratio),
        _report('extension_l2', 4., l2_ratio),
        _report('extension_w12', 64., w12_ratio)
    ]


def verify_ladyzhenskaya(fields: Field, params: PhysicalParams, grid: Grid) -> InequalityReport:
    """
    ||u||_{L4}^2 <= 16 sqrt(2) ||u|| ||u||_V over a stack of fields. A zero field has ratio 0.
    """
    ratios = jax.jit(jax.vmap(lambda f: inequality_ratios(f, params, grid)['ladyzhenskaya']))(fields)
    return _report('ladyzhenskaya', LADYZHENSKAYA_CONSTANT, ratios)


def verify_suborthonormal(family: TangentFamily, xi_samples: FloatArray, grid: Grid) -> InequalityReport:
    """
    For each xi: sum_ij xi_i xi_j (E phi_i, E phi_j)_{L2} <= sum_i xi_i^2, with E the reflection extension.
    For a family with (phi_i, phi_j)_H = delta_ij / 2 the left side equals sum xi_i^2 - 2 beta ||sum xi_i phi_i||_Gamma^2.

    Args:
        family: the family
        xi_samples: [S, N] coefficient vectors
        grid: grid of the family

    Returns:
        InequalityReport on the worst ratio of the two sides
    """
    xi_samples = jnp.atleast_2d(jnp.asarray(xi_samples))
    if xi_samples.shape[-1] != family.N:
        raise ValueError(f"Expected xi samples of size {family.N}, got {xi_samples.shape[-1]}.")
    big_grid = extended_grid(grid)
    extended = jax.vmap(reflect_field)(family.phis)
    # beta = 0: plain L2 Gram on the extended strip
    gram = jax.vmap(lambda a: jax.vmap(lambda b: h_inner(a, b, 0., big_grid))(extended))(extended)
    lhs = jnp.einsum('si,ij,sj->s', xi_samples, gram, xi_samples)
    ratios = _safe_ratio(lhs, jnp.sum(xi_samples ** 2, axis=-1))
    return _report('suborthonormal', 1., ratios)
