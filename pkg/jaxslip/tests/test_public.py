import numpy as np
import pytest

from jaxslip import DefaultChannelSolver
from jaxslip.harness.forcing import constant_forcing
from jaxslip.internals.types import PhysicalParams


def test_default_channel_solver():
    solver = DefaultChannelSolver(PhysicalParams(alpha=2., beta=0.5, nu=0.5, L=2., T=0.2),
                                  forcing=constant_forcing(0.1, 0.), n_trunc=1, cells_per_unit=4, ny=8)
    np.testing.assert_allclose(solver.params.alpha, 4.)
    np.testing.assert_allclose(solver.params.T, 0.025)
    assert solver.grid.nx == 8
    assert solver.stepper.cfg.dt == pytest.approx(0.025 / 100.)
    trajectory = solver(cadence=25)
    np.testing.assert_allclose(trajectory.times[-1], 0.025, atol=1e-12)
    assert float(trajectory.norms.h_norm[-1]) > 0.
    assert 'DefaultChannelSolver' in repr(solver)


def test_default_channel_solver_validation():
    with pytest.raises(ValueError):
        DefaultChannelSolver(PhysicalParams(alpha=1., beta=1.), cells_per_unit=0)
    with pytest.raises(ValueError):
        DefaultChannelSolver(PhysicalParams(alpha=1., beta=0.))
