import numpy as np
import pytest

from jaxslip.constitutive.conditions import validate_conditions
from jaxslip.constitutive.laws import linear_stress, linear_slip, example_shear_dependent_stress, \
    example_nonlinear_slip, nonlinear_slip


@pytest.mark.parametrize('law', [linear_stress(1.), linear_slip(1.)])
def test_linear_ratios(law):
    report = validate_conditions(law, sample_count=1000, rng_seed=0)
    np.testing.assert_allclose([report.min_coercivity_ratio, report.max_growth_ratio, report.min_derivative_ratio],
                               [2., 2., 2.], rtol=1e-10)
    assert report.passed
    assert report.sample_count == 1000


def test_declared_c1_too_large():
    report = validate_conditions(linear_stress(1.)._replace(c1=3.), sample_count=1000)
    assert not report.coercivity_ok
    assert report.growth_ok
    assert report.derivative_ok
    assert not report.passed


@pytest.mark.parametrize('law', [example_shear_dependent_stress(), example_nonlinear_slip()])
def test_examples_pass_with_true_constants(law):
    report = validate_conditions(law, sample_count=2000, rng_seed=1)
    assert report.passed
    assert report.min_coercivity_ratio >= law.c1 * (1. - 1e-6)
    assert report.max_growth_ratio <= law.c2 * (1. + 1e-6)


def test_slip_example_with_c1_two_is_flagged():
    # the derivative coercivity of 2u + u/(1 + |u|^2) dips to 15/8 near |u|^2 = 3
    law = nonlinear_slip(example_nonlinear_slip().function, c1=2., c2=3., c3=2.)
    report = validate_conditions(law, sample_count=2000, rng_seed=0)
    assert not report.derivative_ok
    assert not report.passed
    assert report.min_derivative_ratio >= 15. / 8. * (1. - 1e-6)


def test_bad_sample_count():
    with pytest.raises(ValueError):
        validate_conditions(linear_slip(1.), sample_count=0)
