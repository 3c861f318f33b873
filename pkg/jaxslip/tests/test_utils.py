import io

import numpy as np
import pytest

from jaxslip.constitutive.laws import linear_laws
from jaxslip.core.grid import build_grid
from jaxslip.harness.forcing import constant_forcing
from jaxslip.internals.types import PhysicalParams, SolverConfig, CheckResult, VerificationReport, \
    AbsorbingBallReport
from jaxslip.core.fields import zero_state
from jaxslip.solver.stepper import ChannelStepper
from jaxslip.utils import VERIFICATION_CHECKS, _bit_mask, failed_checks, summary, verification_summary, save_results, \
    load_results


def test_bit_mask():
    assert _bit_mask(1, width=2) == [1, 0]
    assert _bit_mask(2, width=2) == [0, 1]
    assert _bit_mask(3, width=2) == [1, 1]
    assert len(_bit_mask(0, width=len(VERIFICATION_CHECKS))) == len(VERIFICATION_CHECKS)


def test_failed_checks():
    assert failed_checks(0) == []
    assert failed_checks(0b101) == ['constitutive', 'extension']
    assert failed_checks(1 << 10) == ['bound_monotonicity']


@pytest.fixture(scope='module')
def trajectory():
    params = PhysicalParams(alpha=1., beta=1.)
    grid = build_grid(params, 2, 16, 8)
    stepper = ChannelStepper(params, grid, linear_laws(1.), constant_forcing(1., 0.), SolverConfig(dt=0.01))
    return stepper.run(zero_state(grid), 4, cadence=2)


def test_summary(trajectory):
    f = io.StringIO()
    summary(trajectory, f_obj=f)
    out = f.getvalue()
    assert 'steps: 4' in out
    assert 'samples: 3 (every 2 steps)' in out
    assert '||u||_H' in out


def test_summary_to_file(trajectory, tmp_path):
    path = str(tmp_path / 'summary.txt')
    summary(trajectory, f_obj=path)
    with open(path) as fp:
        assert 'max |div u|' in fp.read()
    with pytest.raises(TypeError):
        summary(trajectory, f_obj=3)


def test_verification_summary():
    checks = [CheckResult(name=name, passed=name != 'korn', details={}) for name in VERIFICATION_CHECKS]
    report = VerificationReport(checks=checks, failed_mask=2, passed=False)
    f = io.StringIO()
    verification_summary(report, f_obj=f)
    lines = f.getvalue().splitlines()
    assert 'korn                 FAIL' in lines
    assert lines[lines.index('Failed:') + 1] == '  korn'


def test_save_load_results(tmp_path):
    report = AbsorbingBallReport(r_theory=1.5, delta=0.1, entry_time=float('inf'), entered=False, violations=0,
                                 monotonicity_violations=0)
    path = str(tmp_path / 'ball.json')
    save_results(report, path)
    assert load_results(path) == report


def test_save_load_trajectory(trajectory, tmp_path):
    path = str(tmp_path / 'run.json')
    save_results(trajectory, path)
    loaded = load_results(path)
    np.testing.assert_allclose(loaded.times, np.asarray(trajectory.times))
    np.testing.assert_allclose(loaded.final_state.u, np.asarray(trajectory.final_state.u))
    assert loaded.snapshots is None
    assert loaded.cadence == 2


def test_save_results_warns_on_extension(tmp_path):
    report = AbsorbingBallReport(r_theory=1., delta=0.1, entry_time=0., entered=True, violations=0,
                                 monotonicity_violations=0)
    with pytest.warns(UserWarning):
        save_results(report, str(tmp_path / 'ball.txt'))
    with pytest.raises(ValueError):
        save_results(dict(a=1), str(tmp_path / 'bad.json'))
