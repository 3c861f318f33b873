from typing import TypeVar, Callable, Tuple

from jax import lax, numpy as jnp

from jaxslip.internals.types import FloatArray

V = TypeVar('V')
Y = TypeVar('Y')


def cumulative_scan(op: Callable[[V, Y], V], init: V, xs: Y) -> Tuple[V, V]:
    """
    Running accumulation of `op` over the leading axis of `xs`.

    Returns:
        the final accumulated value, and the accumulated value after each element
    """

    def body(accumulate: V, y: Y):
        accumulate = op(accumulate, y)
        return accumulate, accumulate

    return lax.scan(body, init, xs)


def cumulative_trapezoid(values: FloatArray, times: FloatArray) -> FloatArray:
    """
    Running trapezoid integral of a sampled series, starting at zero.

    Args:
        values: [S] samples
        times: [S] sample times, nondecreasing

    Returns:
        [S] integral from times[0] up to each sample time
    """
    values = jnp.asarray(values)
    times = jnp.asarray(times)
    zero = jnp.zeros((1,), values.dtype)
    if values.shape[0] < 2:
        return jnp.zeros_like(values)
    panels = 0.5 * (values[1:] + values[:-1]) * jnp.diff(times)
    _, running = cumulative_scan(jnp.add, zero[0], panels)
    return jnp.concatenate([zero, running])
