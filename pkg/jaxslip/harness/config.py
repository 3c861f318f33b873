import os
import sys
from typing import NamedTuple, Optional, Tuple, Union, Any, Dict

from jax import random

from jaxslip.attractor.dimension import DEFAULT_KAPPA
from jaxslip.constitutive.laws import linear_stress, linear_slip, example_shear_dependent_stress, \
    example_nonlinear_slip
from jaxslip.core.fields import zero_state, state_from_field, field_from_stream_function
from jaxslip.core.grid import build_grid, check_params
from jaxslip.core.scaling import nondimensionalize
from jaxslip.harness.forcing import FORCING_TEMPLATES, zero_forcing, constant_forcing, gaussian_bump_forcing, \
    boundary_bump_forcing, forcing_support, normalise_forcing
from jaxslip.internals.random import bump_stream_function, random_admissible_field
from jaxslip.internals.types import PhysicalParams, Grid, Laws, Forcing, SolverConfig, FlowState

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    'RunConfig',
    'Problem',
    'STRESS_KINDS',
    'SLIP_KINDS',
    'INIT_KINDS',
    'load_config',
    'config_from_dict',
    'physical_params',
    'laws_from_config',
    'forcing_from_config',
    'initial_state',
    'build_problem'
]

STRESS_KINDS = ('linear', 'shear_dependent')
SLIP_KINDS = ('linear', 'nonlinear')
INIT_KINDS = ('zero', 'bump', 'random')


class RunConfig(NamedTuple):
    """
    Flat run configuration. Physical symbols keep their names; the solver works on the scaled problem.
    Forcing templates are given in physical coordinates, initial data in scaled coordinates.
    """
    # physics
    alpha: float = 1.
    beta: float = 1.
    nu: float = 1.
    L: float = 1.
    T: float = 1.
    kappa: float = DEFAULT_KAPPA
    # grid
    n_trunc: int = 2
    nx: int = 32
    ny: int = 16
    x_mode: str = 'dirichlet_ends'
    # solver
    dt: float = 0.01
    theta: float = 1.
    div_tol: float = 1e-10
    convection_scheme: str = 'skew_symmetric'
    pressure_solver: str = 'diagonalisation'
    # laws, declared constants override the law's own
    stress: str = 'linear'
    slip: str = 'linear'
    stress_c1: Optional[float] = None
    stress_c2: Optional[float] = None
    stress_c3: Optional[float] = None
    slip_c1: Optional[float] = None
    slip_c2: Optional[float] = None
    slip_c3: Optional[float] = None
    # forcing
    forcing: str = 'zero'
    forcing_amplitude: float = 1.
    forcing_x0: float = 0.
    forcing_sigma: float = 0.25
    forcing_f1: float = 1.
    forcing_f2: float = 0.
    forcing_h: float = 0.
    fnorm: Optional[float] = None
    # initial data
    init: str = 'bump'
    init_amplitude: float = 1.
    init_x0: float = 0.
    init_width: float = 1.
    # outputs and studies
    cadence: int = 1
    seed: int = 0
    n_list: Tuple[int, ...] = (4, 8, 16, 32)
    trace_n: Tuple[int, ...] = (4, 8)
    trace_strategies: Tuple[str, ...] = ('random', 'stokes')
    epsilons: Tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    sample_count: int = 200
    out_dir: str = 'out'
    num_workers: int = 1


class Problem(NamedTuple):
    """A configured run in scaled variables, plus the physical data it came from."""
    params: PhysicalParams
    grid: Grid
    laws: Laws
    forcing: Forcing
    solver: SolverConfig
    physical_params: PhysicalParams
    physical_forcing: Forcing


_TUPLE_KEYS = {'n_list': int, 'trace_n': int, 'trace_strategies': str, 'epsilons': float}


def config_from_dict(values: Dict[str, Any], base: Optional[RunConfig] = None) -> RunConfig:
    """
    Raises:
        ValueError: on unknown keys or invalid choices.
    """
    base = RunConfig() if base is None else base
    unknown = set(values) - set(RunConfig._fields)
    if unknown:
        raise ValueError(f"Unknown config keys {sorted(unknown)}.")
    cleaned = {}
    for key, value in values.items():
        if value is None:
            continue
        if key in _TUPLE_KEYS:
            if isinstance(value, (str, int, float)):
                value = [value]
            value = tuple(_TUPLE_KEYS[key](v) for v in value)
        cleaned[key] = value
    cfg = base._replace(**cleaned)
    if cfg.stress not in STRESS_KINDS:
        raise ValueError(f"Invalid stress {cfg.stress}, expected one of {STRESS_KINDS}.")
    if cfg.slip not in SLIP_KINDS:
        raise ValueError(f"Invalid slip {cfg.slip}, expected one of {SLIP_KINDS}.")
    if cfg.forcing not in FORCING_TEMPLATES:
        raise ValueError(f"Invalid forcing {cfg.forcing}, expected one of {FORCING_TEMPLATES}.")
    if cfg.init not in INIT_KINDS:
        raise ValueError(f"Invalid init {cfg.init}, expected one of {INIT_KINDS}.")
    if cfg.cadence < 1:
        raise ValueError(f"Expected cadence >= 1, got {cfg.cadence}.")
    if cfg.num_workers < 1:
        raise ValueError(f"Expected num_workers >= 1, got {cfg.num_workers}.")
    return cfg


def load_config(path: Optional[Union[str, os.PathLike]] = None, **overrides) -> RunConfig:
    """
    Read a flat TOML file of key = value pairs, then apply overrides (None values are ignored).

    Raises:
        ValueError: on unknown keys or invalid values.
    """
    values = {}
    if path is not None:
        with open(path, 'rb') as fp:
            values = tomllib.load(fp)
    cfg = config_from_dict(values)
    return config_from_dict(overrides, base=cfg)


def physical_params(cfg: RunConfig) -> PhysicalParams:
    params = PhysicalParams(alpha=float(cfg.alpha), beta=float(cfg.beta), nu=float(cfg.nu), L=float(cfg.L),
                            T=float(cfg.T))
    check_params(params, allow_zero_beta=True)
    return params


def laws_from_config(cfg: RunConfig) -> Laws:
    """
    Laws of the scaled problem (nu = 1). Declared constants replace the law's own without validation, so that
    inconsistent declarations surface in the condition checks rather than here.
    """
    stress = linear_stress(1.) if cfg.stress == 'linear' else example_shear_dependent_stress()
    slip = linear_slip(1.) if cfg.slip == 'linear' else example_nonlinear_slip()
    stress = stress._replace(**{name: float(getattr(cfg, f'stress_{name}')) for name in ('c1', 'c2', 'c3')
                                if getattr(cfg, f'stress_{name}') is not None})
    slip = slip._replace(**{name: float(getattr(cfg, f'slip_{name}')) for name in ('c1', 'c2', 'c3')
                            if getattr(cfg, f'slip_{name}') is not None})
    return Laws(stress=stress, slip=slip)


def forcing_from_config(cfg: RunConfig, params: PhysicalParams, grid: Grid) -> Forcing:
    """
    Physical forcing of a template, normalised to ||(f, h)||_{H_L} = fnorm when fnorm is set.
    """
    if cfg.forcing == 'zero':
        forcing = zero_forcing()
    elif cfg.forcing == 'constant':
        forcing = constant_forcing(cfg.forcing_f1, cfg.forcing_f2, cfg.forcing_h)
    elif cfg.forcing == 'gaussian_bump':
        forcing = gaussian_bump_forcing(cfg.forcing_amplitude, cfg.forcing_x0, cfg.forcing_sigma, params.L)
    else:
        forcing = boundary_bump_forcing(cfg.forcing_amplitude, cfg.forcing_x0, cfg.forcing_sigma)
    if cfg.fnorm is not None:
        forcing = normalise_forcing(forcing, params, grid, cfg.fnorm)
    return forcing


def initial_state(cfg: RunConfig, grid: Grid) -> FlowState:
    """
    Initial state from a stream function: zero, a deterministic bump y(1 - y)^2 chi((x - x0)/width), or a random
    admissible field from the seed.
    """
    if cfg.init == 'zero':
        return zero_state(grid)
    if cfg.init == 'bump':
        psi = bump_stream_function(cfg.init_amplitude, cfg.init_x0, cfg.init_width)
        return state_from_field(field_from_stream_function(psi, grid), grid)
    return state_from_field(random_admissible_field(random.PRNGKey(cfg.seed), grid), grid)


def build_problem(cfg: RunConfig, n_trunc: Optional[int] = None, nx: Optional[int] = None) -> Problem:
    """
    Scaled problem of a configuration, optionally on another truncation.

    Raises:
        ValueError: on invalid parameters, or compactly supported forcing that leaves the truncated channel.
    """
    params = physical_params(cfg)
    n_trunc = cfg.n_trunc if n_trunc is None else n_trunc
    nx = cfg.nx if nx is None else nx
    grid = build_grid(params, n_trunc, nx, cfg.ny, cfg.x_mode)
    support = forcing_support(cfg.forcing, cfg.forcing_x0, cfg.forcing_sigma)
    if support is not None and not grid.periodic and (support[0] < -n_trunc * params.L or
                                                      support[1] > n_trunc * params.L):
        raise ValueError(f"Forcing support {support} exceeds the truncated channel (-{n_trunc}, {n_trunc}) "
                         f"of width L={params.L}.")
    physical_forcing = forcing_from_config(cfg, params, grid)
    scaled_params, scaled_forcing = nondimensionalize(params, physical_forcing)
    solver = SolverConfig(dt=cfg.dt, div_tol=cfg.div_tol, convection_scheme=cfg.convection_scheme, theta=cfg.theta,
                          pressure_solver=cfg.pressure_solver)
    return Problem(params=scaled_params, grid=grid, laws=laws_from_config(cfg), forcing=scaled_forcing,
                   solver=solver, physical_params=params, physical_forcing=physical_forcing)
