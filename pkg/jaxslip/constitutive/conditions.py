from typing import Union

import jax
from jax import random, numpy as jnp

from jaxslip.constitutive.laws import stress_eval, slip_eval
from jaxslip.internals.logging import logger
from jaxslip.internals.types import StressLaw, SlipLaw, ConditionReport, PRNGKey, float_type

__all__ = [
    'validate_conditions'
]

_MIN_LOG_MAGNITUDE = -3.
_MAX_LOG_MAGNITUDE = 2.


def _sample_directions(key: PRNGKey, num: int, is_matrix: bool):
    if is_matrix:
        raw = random.normal(key, (num, 2, 2), float_type)
        raw = 0.5 * (raw + jnp.swapaxes(raw, -1, -2))
        norms = jnp.sqrt(jnp.sum(raw ** 2, axis=(-2, -1), keepdims=True))
    else:
        raw = random.normal(key, (num, 2), float_type)
        norms = jnp.sqrt(jnp.sum(raw ** 2, axis=-1, keepdims=True))
    return raw / norms


def _sample_points(key: PRNGKey, num: int, is_matrix: bool):
    # log-uniform magnitudes in [1e-3, 1e2]
    direction_key, magnitude_key = random.split(key)
    directions = _sample_directions(direction_key, num, is_matrix)
    magnitudes = 10. ** random.uniform(magnitude_key, (num,), float_type, minval=_MIN_LOG_MAGNITUDE,
                                       maxval=_MAX_LOG_MAGNITUDE)
    return directions * magnitudes.reshape((num,) + (1,) * (directions.ndim - 1))


def validate_conditions(law: Union[StressLaw, SlipLaw], sample_count: int = 1000, rng_seed: int = 0,
                        tol: float = 1e-6) -> ConditionReport:
    """
    Check coercivity, growth and derivative coercivity of a constitutive law by random sampling.

    Monotonicity: (S(D) - S(E)):(D - E) >= c1 |D - E|^2 over random pairs.
    Growth: |S(D)| <= c2 |D|.
    Derivative coercivity: (dS(D)[E]):E >= c3 |E|^2, with the directional derivative taken by forward-mode
    differentiation.

    Args:
        law: a StressLaw (symmetric 2x2 arguments) or SlipLaw (2-vector arguments)
        sample_count: number of samples of each kind
        rng_seed: seed
        tol: relative tolerance on the declared constants

    Returns:
        report with the observed extreme ratios and a flag for each condition
    """
    if sample_count < 1:
        raise ValueError(f"Expected sample_count >= 1, got {sample_count}.")
    is_matrix = isinstance(law, StressLaw)
    if is_matrix:
        def evaluate(x):
            return stress_eval(law, x)

        axes = (-2, -1)
    else:
        def evaluate(x):
            return slip_eval(law, x)

        axes = (-1,)

    def inner(a, b):
        return jnp.sum(a * b, axis=axes)

    key = random.PRNGKey(rng_seed)
    first_key, second_key, direction_key = random.split(key, 3)
    first = _sample_points(first_key, sample_count, is_matrix)
    second = _sample_points(second_key, sample_count, is_matrix)
    directions = _sample_directions(direction_key, sample_count, is_matrix)

    difference = first - second
    coercivity = inner(evaluate(first) - evaluate(second), difference) / inner(difference, difference)
    growth = jnp.sqrt(inner(evaluate(first), evaluate(first)) / inner(first, first))
    _, derivative = jax.vmap(lambda x, e: jax.jvp(evaluate, (x,), (e,)))(first, directions)
    derivative_ratio = inner(derivative, directions) / inner(directions, directions)

    min_coercivity = float(jnp.min(coercivity))
    max_growth = float(jnp.max(growth))
    min_derivative = float(jnp.min(derivative_ratio))
    coercivity_ok = bool(min_coercivity >= law.c1 * (1. - tol))
    growth_ok = bool(max_growth <= law.c2 * (1. + tol))
    derivative_ok = bool(min_derivative >= law.c3 * (1. - tol))
    passed = coercivity_ok and growth_ok and derivative_ok
    if not passed:
        logger.info(f"Structural conditions violated for {law.kind} law: "
                    f"coercivity {min_coercivity:.6g} (c1={law.c1}), growth {max_growth:.6g} (c2={law.c2}), "
                    f"derivative {min_derivative:.6g} (c3={law.c3}).")
    return ConditionReport(
        law_kind=law.kind,
        sample_count=int(sample_count),
        min_coercivity_ratio=min_coercivity,
        max_growth_ratio=max_growth,
        min_derivative_ratio=min_derivative,
        coercivity_ok=coercivity_ok,
        growth_ok=growth_ok,
        derivative_ok=derivative_ok,
        passed=passed
    )
