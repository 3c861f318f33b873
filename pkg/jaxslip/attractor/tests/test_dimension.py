import numpy as np
import pytest

from jaxslip.attractor.dimension import DEFAULT_KAPPA, dimension_bound, dimension_bound_nondimensional
from jaxslip.internals.types import PhysicalParams


def test_reference_values():
    bound = dimension_bound(PhysicalParams(alpha=1., beta=0.))
    assert abs(bound.bound - 24.28) <= 5e-3
    assert abs(bound.dirichlet_reference - 1.482e-3) <= 5e-7
    assert bound.kappa == DEFAULT_KAPPA


def test_zero_beta_matches_no_slip_limit():
    zero_beta = dimension_bound(PhysicalParams(alpha=0.5, beta=0.)).bound
    no_slip = dimension_bound(PhysicalParams(alpha=float('inf'), beta=3.)).bound
    np.testing.assert_allclose(zero_beta, no_slip, rtol=1e-14)


def test_monotone_and_diverging_in_beta():
    bounds = [dimension_bound(PhysicalParams(alpha=1., beta=beta)).bound
              for beta in (0., 1e-2, 1e-1, 1., 10., 100., 1e4)]
    assert np.all(np.diff(bounds) >= 0.)
    assert bounds[-1] > 1e3 * bounds[0]


@pytest.mark.parametrize('params', [PhysicalParams(alpha=0.3, beta=0.7, nu=0.5, L=2., T=3.),
                                    PhysicalParams(alpha=5., beta=0.01, nu=2., L=0.5)])
def test_nondimensional_round_trip(params):
    physical = dimension_bound(params, forcing_h_norm=0.8)
    scaled = dimension_bound_nondimensional(params, forcing_h_norm=0.8)
    np.testing.assert_allclose(scaled.bound, physical.bound, rtol=1e-12)
    np.testing.assert_allclose(scaled.dirichlet_reference, physical.dirichlet_reference, rtol=1e-12)


def test_validation():
    with pytest.raises(ValueError):
        dimension_bound(PhysicalParams(alpha=1., beta=1.), kappa=0.)
    with pytest.raises(ValueError):
        dimension_bound(PhysicalParams(alpha=1., beta=1.), forcing_h_norm=-1.)
    with pytest.raises(ValueError):
        dimension_bound(PhysicalParams(alpha=1., beta=1., nu=0.))
