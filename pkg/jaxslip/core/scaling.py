from typing import NamedTuple, Tuple

from jax import numpy as jnp

from jaxslip.core.fields import sample_forcing
from jaxslip.core.grid import check_params, quadrature_weights
from jaxslip.internals.types import PhysicalParams, Forcing, Grid, FloatArray

__all__ = [
    'ScalingFactors',
    'scaling_factors',
    'nondimensionalize',
    'dimensionalize',
    'forcing_norms',
    'scale_forcing'
]


class ScalingFactors(NamedTuple):
    length: float  # L
    time: float  # L^2 / nu
    velocity: float  # nu / L
    forcing: float  # L^3 / nu^2, multiplies f and h


def scaling_factors(L: float, nu: float) -> ScalingFactors:
    return ScalingFactors(length=L, time=L ** 2 / nu, velocity=nu / L, forcing=L ** 3 / nu ** 2)


def _scale_forcing(forcing: Forcing, factor: float, time: float, length: float) -> Forcing:
    # returns (t, x, y) -> factor * f(time * t, length * x, length * y)
    f, h = forcing.f, forcing.h
    scaled_f = None
    scaled_h = None
    if f is not None:
        def scaled_f(t, x, y):
            f1, f2 = f(time * t, length * x, length * y)
            return factor * f1, factor * f2
    if h is not None:
        def scaled_h(t, x):
            return factor * h(time * t, length * x)
    return Forcing(f=scaled_f, h=scaled_h, time_dependent=forcing.time_dependent)


def scale_forcing(forcing: Forcing, factor: float) -> Forcing:
    """Multiply both f and h by a constant."""
    return _scale_forcing(forcing, factor, 1., 1.)


def nondimensionalize(params: PhysicalParams, forcing: Forcing) -> Tuple[PhysicalParams, Forcing]:
    """
    Map a physical problem on the channel of width L to the unit channel with nu = 1.

    alpha* = alpha L, beta* = beta / L, T* = nu T / L^2 and f*(t*, x*, y*) = (L^3/nu^2) f(tau t*, L x*, L y*) with
    tau = L^2 / nu, likewise for h. Consequently ||(f*, h*)||_H^2 = (L^4/nu^4) ||(f, h)||_{H_L}^2.

    Args:
        params: physical parameters
        forcing: physical forcing

    Returns:
        scaled params (nu = 1, L = 1) and scaled forcing
    """
    check_params(params, allow_zero_beta=True)
    scales = scaling_factors(params.L, params.nu)
    scaled_params = PhysicalParams(
        alpha=params.alpha * params.L,
        beta=params.beta / params.L,
        nu=1.,
        L=1.,
        T=params.nu * params.T / params.L ** 2
    )
    return scaled_params, _scale_forcing(forcing, scales.forcing, scales.time, scales.length)


def dimensionalize(scaled_params: PhysicalParams, scaled_forcing: Forcing, L: float,
                   nu: float) -> Tuple[PhysicalParams, Forcing]:
    """
    Inverse of `nondimensionalize` for a channel of width L and viscosity nu.
    """
    if not (L > 0 and nu > 0):
        raise ValueError(f"Expected L > 0 and nu > 0, got L={L}, nu={nu}.")
    scales = scaling_factors(L, nu)
    params = PhysicalParams(
        alpha=scaled_params.alpha / L,
        beta=scaled_params.beta * L,
        nu=nu,
        L=L,
        T=scaled_params.T * L ** 2 / nu
    )
    return params, _scale_forcing(scaled_forcing, 1. / scales.forcing, 1. / scales.time, 1. / scales.length)


def forcing_norms(forcing: Forcing, params: PhysicalParams, grid: Grid,
                  t: FloatArray = 0.) -> Tuple[FloatArray, FloatArray]:
    """
    Norms of the forcing on the channel of width params.L, by quadrature on `grid` stretched by L.

    Returns:
        (||(f, h)||_{H_L}, ||f||_{L2(Omega_L)})
    """
    sampled = sample_forcing(forcing, grid, t=t, length=params.L)
    weights = quadrature_weights(grid)
    l2_sq = params.L ** 2 * (jnp.sum(weights['u'] * sampled.u ** 2) + jnp.sum(weights['v'] * sampled.v ** 2))
    gamma_sq = params.L * jnp.sum(weights['g'] * sampled.g ** 2)
    return jnp.sqrt(l2_sq + params.beta * gamma_sq), jnp.sqrt(l2_sq)
