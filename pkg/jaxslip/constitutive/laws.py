from typing import Callable, Optional, Union

import jax
from jax import numpy as jnp

from jaxslip.internals.types import StressLaw, SlipLaw, Laws, FloatArray

__all__ = [
    'linear_stress',
    'shear_dependent_stress',
    'example_shear_dependent_stress',
    'linear_slip',
    'nonlinear_slip',
    'example_nonlinear_slip',
    'linear_laws',
    'check_law_constants',
    'stress_eval',
    'slip_eval',
    'slip_jacobian'
]


def check_law_constants(law: Union[StressLaw, SlipLaw]):
    """
    Raises:
        ValueError: unless 0 < c1 <= c2 and c3 > 0.
    """
    if not (0. < law.c1 <= law.c2):
        raise ValueError(f"Expected 0 < c1 <= c2, got c1={law.c1}, c2={law.c2}.")
    if not law.c3 > 0.:
        raise ValueError(f"Expected c3 > 0, got c3={law.c3}.")


def linear_stress(nu: float) -> StressLaw:
    """S(D) = 2 nu D."""
    if not nu > 0:
        raise ValueError(f"Expected nu > 0, got nu={nu}.")
    return StressLaw(kind='linear', nu=nu, c1=2. * nu, c2=2. * nu, c3=2. * nu)


def shear_dependent_stress(viscosity: Callable[[FloatArray], FloatArray], c1: float, c2: float, c3: float,
                           nu_min: Optional[float] = None, nu_max: Optional[float] = None) -> StressLaw:
    """
    S(D) = viscosity(|D|^2) D with declared structural constants.
    """
    law = StressLaw(kind='shear_dependent', nu=nu_max if nu_max is not None else c2, c1=c1, c2=c2, c3=c3,
                    viscosity=viscosity, nu_min=nu_min, nu_max=nu_max)
    check_law_constants(law)
    return law


def example_shear_dependent_stress() -> StressLaw:
    """
    viscosity(s) = 1 + 1/(1 + s). Its derivative coercivity is 1 + (1 - s)/(1 + s)^2 >= 7/8 (minimum at s = 3),
    and |S(D)| <= 2|D|.
    """
    return shear_dependent_stress(lambda s: 1. + 1. / (1. + s), c1=7. / 8., c2=2., c3=7. / 8., nu_min=1.,
                                  nu_max=2.)


def linear_slip(nu: float) -> SlipLaw:
    """s(u) = 2 nu u."""
    if not nu > 0:
        raise ValueError(f"Expected nu > 0, got nu={nu}.")
    return SlipLaw(kind='linear', nu=nu, c1=2. * nu, c2=2. * nu, c3=2. * nu)


def nonlinear_slip(function: Callable[[FloatArray], FloatArray], c1: float, c2: float, c3: float) -> SlipLaw:
    """
    Wall law given directly as a continuously differentiable map of 2-vectors with s(0) = 0. The map must
    broadcast over leading dimensions.
    """
    law = SlipLaw(kind='nonlinear', nu=c2, c1=c1, c2=c2, c3=c3, function=function)
    check_law_constants(law)
    return law


def example_nonlinear_slip() -> SlipLaw:
    """
    s(u) = 2u + u/(1 + |u|^2). Derivative coercivity 2 + (1 - r^2)/(1 + r^2)^2 >= 15/8 (minimum at r^2 = 3),
    growth |s(u)| <= 3|u|.
    """

    def function(u):
        return 2. * u + u / (1. + jnp.sum(u ** 2, axis=-1, keepdims=True))

    return nonlinear_slip(function, c1=15. / 8., c2=3., c3=15. / 8.)


def linear_laws(nu: float = 1.) -> Laws:
    return Laws(stress=linear_stress(nu), slip=linear_slip(nu))


def stress_eval(law: StressLaw, D: FloatArray) -> FloatArray:
    """
    Evaluate S(D) on symmetric matrices of shape [..., 2, 2].
    """
    if law.kind == 'linear':
        return 2. * law.nu * D
    if law.kind == 'shear_dependent':
        shear_sq = jnp.sum(D ** 2, axis=(-2, -1))
        return law.viscosity(shear_sq)[..., None, None] * D
    raise ValueError(f"Unknown stress law kind {law.kind}.")


def slip_eval(law: SlipLaw, u: FloatArray) -> FloatArray:
    """
    Evaluate s(u) on wall velocities of shape [..., 2].
    """
    if law.kind == 'linear':
        return 2. * law.nu * u
    if law.kind == 'nonlinear':
        return law.function(u)
    raise ValueError(f"Unknown slip law kind {law.kind}.")


def slip_jacobian(law: SlipLaw, u: FloatArray) -> FloatArray:
    """
    Jacobian of s at a single 2-vector, [2, 2].
    """
    return jax.jacfwd(lambda w: slip_eval(law, w))(jnp.asarray(u))
