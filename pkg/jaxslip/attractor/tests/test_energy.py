import numpy as np
import pytest

from jaxslip.attractor.energy import energy_residual, energy_residual_order
from jaxslip.constitutive.laws import linear_laws
from jaxslip.harness.forcing import zero_forcing
from jaxslip.internals.types import SolverConfig
from jaxslip.solver.stepper import ChannelStepper


def test_recorded_and_recomputed_agree(navier_stokes_stepper, bump_state):
    trajectory = navier_stokes_stepper.run(bump_state, 4, store_snapshots=True)
    recorded = energy_residual(trajectory)
    recomputed = energy_residual(trajectory, navier_stokes_stepper)
    assert recorded.shape == (4,)
    np.testing.assert_allclose(recomputed, recorded, rtol=1e-8, atol=1e-14)


def test_energy_residual_validation(navier_stokes_stepper, bump_state):
    sparse = navier_stokes_stepper.run(bump_state, 4, cadence=2, store_snapshots=True)
    with pytest.raises(ValueError):
        energy_residual(sparse)
    bare = navier_stokes_stepper.run(bump_state, 2)
    with pytest.raises(ValueError):
        energy_residual(bare, navier_stokes_stepper)


def test_energy_residual_order(small_problem, bump_state):
    params, grid = small_problem
    coarse, fine = (ChannelStepper(params, grid, linear_laws(1.), zero_forcing(), SolverConfig(dt=dt))
                    for dt in (0.01, 0.005))
    ratio, order = energy_residual_order(coarse, fine, bump_state, 0.1)
    assert ratio >= 1.8
    np.testing.assert_allclose(order, np.log2(ratio))
