from typing import Callable

import jax
from jax import random, numpy as jnp

from jaxslip.core.fields import field_from_stream_function
from jaxslip.internals.types import FloatArray, PRNGKey, Grid, Field, float_type

__all__ = [
    'smooth_bump',
    'channel_profile',
    'bump_stream_function',
    'random_stream_function',
    'random_admissible_field',
    'random_admissible_fields'
]


def smooth_bump(z: FloatArray) -> FloatArray:
    """
    C-infinity bump exp(1 - 1/(1 - z^2)) supported on |z| < 1, equal to 1 at z = 0.
    """
    inner = 1. - z ** 2
    safe = jnp.where(inner > 0., inner, 1.)
    return jnp.where(inner > 0., jnp.exp(1. - 1. / safe), 0.)


def channel_profile(y: FloatArray) -> FloatArray:
    """
    y (1 - y)^2: vanishes at both walls, flat at the top wall and has unit slope at the slip wall.
    """
    return y * (1. - y) ** 2


def bump_stream_function(amplitude: float, x0: float, width: float) -> Callable[[FloatArray, FloatArray], FloatArray]:
    """
    Deterministic stream function amplitude * bump((x - x0)/width) * y (1 - y)^2.
    """

    def psi(x, y):
        return amplitude * smooth_bump((x - x0) / width) * channel_profile(y)

    return psi


def random_stream_function(key: PRNGKey, grid: Grid, num_bumps: int = 3) -> Callable[
    [FloatArray, FloatArray], FloatArray]:
    """
    Random stream function psi(x, y) = sum_k a_k chi_k(x) eta(y) (1 + s_k y), with chi_k compact bumps inside
    (-n_trunc, n_trunc). Every such psi gives an admissible field: impermeable walls, no-slip top, zero ends.
    """
    amp_key, centre_key, width_key, shape_key = random.split(key, 4)
    n = float(grid.n_trunc)
    max_width = min(n - grid.dx, 2.)
    widths = random.uniform(width_key, (num_bumps,), float_type, minval=0.25 * max_width, maxval=0.9 * max_width)
    # keep each support inside the open interval, one cell away from the ends
    room = n - widths - grid.dx
    centres = room * random.uniform(centre_key, (num_bumps,), float_type, minval=-1., maxval=1.)
    amplitudes = random.normal(amp_key, (num_bumps,), float_type)
    shapes = random.uniform(shape_key, (num_bumps,), float_type, minval=-0.5, maxval=2.)

    def psi(x, y):
        chi = smooth_bump((x - centres) / widths)
        return jnp.sum(amplitudes * chi * (1. + shapes * y)) * channel_profile(y)

    return psi


def random_admissible_field(key: PRNGKey, grid: Grid, num_bumps: int = 3) -> Field:
    return field_from_stream_function(random_stream_function(key, grid, num_bumps), grid)


def random_admissible_fields(key: PRNGKey, grid: Grid, num: int, num_bumps: int = 3) -> Field:
    """
    Stack of `num` random admissible fields, leading dimension num.
    """
    keys = random.split(key, num)
    return jax.vmap(lambda k: random_admissible_field(k, grid, num_bumps))(keys)
