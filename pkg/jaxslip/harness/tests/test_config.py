import numpy as np
import pytest

from jaxslip.constants.eigenvalue import capital_lambda
from jaxslip.core.scaling import forcing_norms
from jaxslip.harness.config import RunConfig, load_config, config_from_dict, laws_from_config, initial_state, \
    build_problem


def test_defaults():
    cfg = load_config()
    assert cfg == RunConfig()
    assert cfg.n_list == (4, 8, 16, 32)


def test_load_toml_with_overrides(tmp_path):
    path = tmp_path / 'run.toml'
    path.write_text('alpha = 0.5\nbeta = 2.0\nn_list = [2, 4]\nforcing = "gaussian_bump"\ntrace_n = 3\n')
    cfg = load_config(path, beta=None, dt=0.02)
    assert cfg.alpha == 0.5
    assert cfg.beta == 2.
    assert cfg.dt == 0.02
    assert cfg.n_list == (2, 4)
    assert cfg.trace_n == (3,)
    assert cfg.forcing == 'gaussian_bump'


def test_unknown_key(tmp_path):
    path = tmp_path / 'run.toml'
    path.write_text('alpha = 1.0\nviscosity = 2.0\n')
    with pytest.raises(ValueError):
        load_config(path)


@pytest.mark.parametrize('values', [dict(stress='power_law'), dict(slip='stick'), dict(forcing='wind'),
                                    dict(init='noise'), dict(cadence=0), dict(num_workers=0)])
def test_invalid_choices(values):
    with pytest.raises(ValueError):
        config_from_dict(values)


def test_declared_law_constants():
    laws = laws_from_config(RunConfig(slip='nonlinear', slip_c1=2.))
    assert laws.slip.kind == 'nonlinear'
    assert laws.slip.c1 == 2.
    assert laws.stress.kind == 'linear'


def test_build_problem_scales():
    cfg = RunConfig(alpha=2., beta=0.5, nu=0.5, L=2., T=1., forcing='constant', fnorm=1.)
    problem = build_problem(cfg)
    np.testing.assert_allclose(problem.params.alpha, 4.)
    np.testing.assert_allclose(problem.params.beta, 0.25)
    np.testing.assert_allclose(problem.params.T, 0.125)
    assert problem.params.nu == 1.
    np.testing.assert_allclose(forcing_norms(problem.physical_forcing, problem.physical_params, problem.grid)[0], 1.,
                               rtol=1e-10)
    # ||(f*, h*)||_H = (L^2 / nu^2) ||(f, h)||_{H_L}
    np.testing.assert_allclose(forcing_norms(problem.forcing, problem.params, problem.grid)[0], 16., rtol=1e-10)
    assert capital_lambda(problem.params.alpha, problem.params.beta) > 0.


def test_build_problem_other_truncation():
    problem = build_problem(RunConfig(), n_trunc=4, nx=64)
    assert problem.grid.n_trunc == 4
    assert problem.grid.nx == 64
    np.testing.assert_allclose(problem.grid.dx, build_problem(RunConfig()).grid.dx)


def test_forcing_outside_channel():
    with pytest.raises(ValueError):
        build_problem(RunConfig(forcing='gaussian_bump', forcing_x0=1.8, forcing_sigma=0.25))


@pytest.mark.parametrize('init', ['zero', 'bump', 'random'])
def test_initial_state(init):
    cfg = RunConfig(init=init)
    grid = build_problem(cfg).grid
    state = initial_state(cfg, grid)
    assert state.u.shape == (grid.nux, grid.ny)
    assert float(state.t) == 0.
    if init == 'zero':
        assert float(np.max(np.abs(state.u))) == 0.
    else:
        assert float(np.max(np.abs(state.u))) > 0.
