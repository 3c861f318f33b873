import numpy as np
from jax import numpy as jnp

from jaxslip.internals.cumulative_ops import cumulative_scan, cumulative_trapezoid
from jaxslip.internals.types import float_type


def test_cumulative_scan():
    xs = jnp.asarray([1, 2, 3], float_type)
    final, running = cumulative_scan(jnp.add, jnp.asarray(0, float_type), xs)
    assert final == 6
    np.testing.assert_array_equal(running, [1., 3., 6.])

    final, running = cumulative_scan(jnp.maximum, jnp.asarray(2, float_type), xs)
    assert final == 3
    np.testing.assert_array_equal(running, [2., 2., 3.])


def test_cumulative_trapezoid():
    times = jnp.linspace(0., 2., 21)
    # exact for linear integrands
    running = cumulative_trapezoid(3. * times + 1., times)
    np.testing.assert_allclose(running, 1.5 * times ** 2 + times, atol=1e-12)
    assert running[0] == 0.


def test_cumulative_trapezoid_single_sample():
    running = cumulative_trapezoid(jnp.asarray([5.]), jnp.asarray([0.]))
    np.testing.assert_allclose(running, [0.])


def test_cumulative_trapezoid_nonuniform():
    times = jnp.asarray([0., 0.5, 2., 3.])
    values = jnp.asarray([1., 1., 1., 1.])
    np.testing.assert_allclose(cumulative_trapezoid(values, times), times, atol=1e-14)
