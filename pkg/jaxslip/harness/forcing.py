from typing import Optional, Tuple

from jax import numpy as jnp

from jaxslip.core.scaling import forcing_norms, scale_forcing
from jaxslip.internals.types import Forcing, PhysicalParams, Grid

__all__ = [
    'FORCING_TEMPLATES',
    'zero_forcing',
    'constant_forcing',
    'gaussian_bump_forcing',
    'boundary_bump_forcing',
    'forcing_support',
    'normalise_forcing'
]

FORCING_TEMPLATES = ('zero', 'constant', 'gaussian_bump', 'boundary_bump')

# gaussians are cut off at this many standard deviations
_TRUNCATION = 4.


def _truncated_gaussian(x, x0: float, sigma: float):
    z = (x - x0) / sigma
    return jnp.where(jnp.abs(z) < _TRUNCATION, jnp.exp(-0.5 * z ** 2), 0.)


def zero_forcing() -> Forcing:
    return Forcing()


def constant_forcing(f1: float = 1., f2: float = 0., h: float = 0.) -> Forcing:
    """Spatially constant body force (f1, f2) and wall force h."""

    def f(t, x, y):
        ones = jnp.ones(jnp.broadcast_shapes(jnp.shape(x), jnp.shape(y)))
        return f1 * ones, f2 * ones

    def wall(t, x):
        return h * jnp.ones_like(x)

    return Forcing(f=f, h=wall if h != 0. else None)


def gaussian_bump_forcing(amplitude: float = 1., x0: float = 0., sigma: float = 0.5, L: float = 1.) -> Forcing:
    """
    Body force f = (A exp(-(x - x0)^2 / (2 sigma^2)) sin(pi y / L), 0), truncated to |x - x0| < 4 sigma so that
    it has compact support.
    """
    if not sigma > 0.:
        raise ValueError(f"Expected sigma > 0, got sigma={sigma}.")

    def f(t, x, y):
        f1 = amplitude * _truncated_gaussian(x, x0, sigma) * jnp.sin(jnp.pi * y / L)
        return f1, jnp.zeros_like(f1)

    return Forcing(f=f)


def boundary_bump_forcing(amplitude: float = 1., x0: float = 0., sigma: float = 0.5) -> Forcing:
    """Wall force h = A exp(-(x - x0)^2 / (2 sigma^2)) truncated to |x - x0| < 4 sigma, no body force."""
    if not sigma > 0.:
        raise ValueError(f"Expected sigma > 0, got sigma={sigma}.")

    def h(t, x):
        return amplitude * _truncated_gaussian(x, x0, sigma)

    return Forcing(h=h)


def forcing_support(template: str, x0: float, sigma: float) -> Optional[Tuple[float, float]]:
    """x-interval containing the support of a template, None when it is not compactly supported."""
    if template in ('gaussian_bump', 'boundary_bump'):
        return x0 - _TRUNCATION * sigma, x0 + _TRUNCATION * sigma
    if template == 'zero':
        return 0., 0.
    return None


def normalise_forcing(forcing: Forcing, params: PhysicalParams, grid: Grid, fnorm: float) -> Forcing:
    """
    Rescale so that ||(f, h)||_{H_L} = fnorm by quadrature on the grid.

    Raises:
        ValueError: for a zero forcing with fnorm > 0.
    """
    current = float(forcing_norms(forcing, params, grid)[0])
    if current == 0.:
        if fnorm == 0.:
            return forcing
        raise ValueError("Cannot normalise a zero forcing.")
    return scale_forcing(forcing, fnorm / current)
