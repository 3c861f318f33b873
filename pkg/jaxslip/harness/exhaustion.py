import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional, Sequence, Tuple

import jax
import numpy as np
from jax import numpy as jnp
from tqdm import tqdm

from jaxslip.core.fields import compute_norms
from jaxslip.harness.config import RunConfig, build_problem, initial_state, physical_params
from jaxslip.harness.forcing import forcing_support
from jaxslip.internals.cumulative_ops import cumulative_trapezoid
from jaxslip.internals.logging import logger
from jaxslip.internals.types import ExhaustionReport, Field, Grid, TrajectorySummary
from jaxslip.solver.stepper import ChannelStepper

__all__ = [
    'cells_per_unit',
    'check_exhaustion_config',
    'zero_extend',
    'run_member',
    'run_exhaustion'
]

# relative slack when comparing consecutive errors
_RTOL = 1e-9
_ATOL = 1e-14


def cells_per_unit(cfg: RunConfig) -> int:
    """
    Cells per unit (scaled) length of the configured grid, kept fixed across truncations.

    Raises:
        ValueError: if nx does not resolve the configured truncation into whole cells per unit length.
    """
    if cfg.nx % (2 * cfg.n_trunc) != 0:
        raise ValueError(f"Expected nx divisible by 2 n_trunc for a fixed dx across truncations, "
                         f"got nx={cfg.nx}, n_trunc={cfg.n_trunc}.")
    return cfg.nx // (2 * cfg.n_trunc)


def check_exhaustion_config(cfg: RunConfig, n_list: Sequence[int]):
    """
    Raises:
        ValueError: if the truncations cannot be compared by zero-extension.
    """
    if cfg.x_mode != 'dirichlet_ends':
        raise ValueError(f"Exhaustion needs x_mode='dirichlet_ends', got {cfg.x_mode}.")
    if len(n_list) == 0:
        raise ValueError("Expected a nonempty n_list.")
    if any(int(n) != n or n < 1 for n in n_list):
        raise ValueError(f"Expected integer truncations >= 1, got {list(n_list)}.")
    cells_per_unit(cfg)
    n_min = min(n_list)
    params = physical_params(cfg)
    support = forcing_support(cfg.forcing, cfg.forcing_x0, cfg.forcing_sigma)
    if support is None:
        raise ValueError(f"Forcing template {cfg.forcing} is not compactly supported.")
    if support[0] < -n_min * params.L or support[1] > n_min * params.L:
        raise ValueError(f"Forcing support {support} exceeds the smallest truncation "
                         f"(-{n_min * params.L}, {n_min * params.L}).")
    if cfg.init == 'random':
        raise ValueError("Exhaustion needs a deterministic compactly supported start, got init='random'.")
    if cfg.init == 'bump' and (cfg.init_x0 - cfg.init_width < -n_min or cfg.init_x0 + cfg.init_width > n_min):
        raise ValueError(f"Initial bump ({cfg.init_x0} +- {cfg.init_width}) exceeds the smallest truncation "
                         f"(-{n_min}, {n_min}).")


def zero_extend(fields: Field, offset: int, grid: Grid) -> Field:
    """
    Embed fields of a shorter channel (leading sample dimension) into `grid` by zero-extension,
    the shorter channel starting `offset` cells from the left end.
    """
    nux = fields.u.shape[1]
    nx = fields.v.shape[1]
    num = fields.u.shape[0]
    u = jnp.zeros((num, grid.nux, grid.ny), fields.u.dtype).at[:, offset:offset + nux].set(fields.u)
    v = jnp.zeros((num, grid.nx, grid.ny + 1), fields.v.dtype).at[:, offset:offset + nx].set(fields.v)
    g = jnp.zeros((num, grid.nux), fields.g.dtype).at[:, offset:offset + nux].set(fields.g)
    return Field(u=u, v=v, g=g)


def run_member(cfg: RunConfig, n: int) -> Tuple[TrajectorySummary, Grid]:
    """
    One truncation at the fixed cell size, with stored snapshots.
    """
    problem = build_problem(cfg, n_trunc=n, nx=2 * n * cells_per_unit(cfg))
    stepper = ChannelStepper(params=problem.params, grid=problem.grid, laws=problem.laws,
                             forcing=problem.forcing, cfg=problem.solver)
    state = initial_state(cfg, problem.grid)
    logger.info(f"Exhaustion member n={n}: {problem.grid.nx}x{problem.grid.ny} cells to t={problem.params.T}.")
    return stepper.run_to_time(state, problem.params.T, cadence=cfg.cadence, store_snapshots=True), problem.grid


def run_exhaustion(cfg: RunConfig, n_list: Optional[Sequence[int]] = None,
                   num_workers: Optional[int] = None) -> ExhaustionReport:
    """
    Solve on growing truncations Q_n = (-n, n) x (0, 1) at a fixed cell size and compare each zero-extended
    solution with the largest one in L2(0, T; H).

    Args:
        cfg: run configuration; its nx/n_trunc sets the cell size
        n_list: truncations, defaults to cfg.n_list
        num_workers: threads running the members, defaults to cfg.num_workers

    Returns:
        ExhaustionReport with errors ordered as the sorted n_list

    Raises:
        ValueError: if the forcing or the initial state is not supported inside the smallest truncation.
        ConvergenceError: if a member fails.
    """
    n_list = sorted(set(int(n) for n in (cfg.n_list if n_list is None else n_list)))
    num_workers = cfg.num_workers if num_workers is None else num_workers
    check_exhaustion_config(cfg, n_list)
    ref_n = n_list[-1]
    members: Dict[int, Tuple[TrajectorySummary, Grid]] = {}
    with ThreadPoolExecutor(max_workers=num_workers) as executor:
        futures = {n: executor.submit(run_member, cfg, n) for n in n_list}
        for n in tqdm(n_list, desc='exhaustion'):
            members[n] = futures[n].result()
    ref_traj, ref_grid = members[ref_n]
    ref_fields = Field(u=ref_traj.snapshots.u, v=ref_traj.snapshots.v, g=ref_traj.snapshots.g)
    params = build_problem(cfg, n_trunc=ref_n, nx=ref_grid.nx).params
    h_norm_sq = jax.vmap(lambda w: compute_norms(w, params, ref_grid).h_norm ** 2)

    errors = []
    for n in n_list:
        traj, _ = members[n]
        if traj.times.shape != ref_traj.times.shape:
            raise ValueError(f"Member n={n} sampled {traj.times.shape[0]} times, reference {ref_traj.times.shape[0]}.")
        fields = Field(u=traj.snapshots.u, v=traj.snapshots.v, g=traj.snapshots.g)
        extended = zero_extend(fields, (ref_n - n) * cells_per_unit(cfg), ref_grid)
        w = jax.tree.map(jnp.subtract, extended, ref_fields)
        integral = cumulative_trapezoid(h_norm_sq(w), ref_traj.times)[-1]
        errors.append(float(np.sqrt(max(float(integral), 0.))))
    errors = np.asarray(errors)

    inversions = int(np.sum(errors[1:] > errors[:-1] * (1. + _RTOL) + _ATOL))
    if inversions == 1:
        warnings.warn(f"Exhaustion errors have one inversion, attributed to the discretisation floor: {errors}.")
    elif inversions > 1:
        warnings.warn(f"Exhaustion errors are not nonincreasing in n: {errors}.")
    logger.info(f"Exhaustion errors against n={ref_n}: {dict(zip(n_list, errors.tolist()))}")
    return ExhaustionReport(n_list=n_list, errors=errors, ref_n=ref_n, nonincreasing=inversions <= 1)
