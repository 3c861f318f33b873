import argparse
import csv
import os
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np
from jax import random

from jaxslip.attractor.absorbing import absorbing_ball_check, absorbing_radius, burn_in
from jaxslip.attractor.dimension import dimension_bound
from jaxslip.attractor.tangent import quasidiff_ratios
from jaxslip.attractor.trace import n_trace_estimate
from jaxslip.constants.eigenvalue import boundary_eigenvalue_mu, capital_lambda, discrete_lambda_sq
from jaxslip.core.fields import h_inner
from jaxslip.core.grid import build_grid
from jaxslip.core.io import save_field, write_field_csv, write_series_csv
from jaxslip.errors import ConvergenceError
from jaxslip.harness.config import RunConfig, load_config, build_problem, initial_state
from jaxslip.harness.exhaustion import run_exhaustion
from jaxslip.harness.suite import run_verification_suite
from jaxslip.internals.logging import logger
from jaxslip.internals.random import random_admissible_field
from jaxslip.internals.types import PhysicalParams
from jaxslip.plotting import plot_trajectory
from jaxslip.solver.stepper import ChannelStepper
from jaxslip.utils import summary, verification_summary, save_results

__all__ = [
    'SUBCOMMANDS',
    'cli_main'
]

SUBCOMMANDS = ('simulate', 'constants', 'dimension', 'tangent', 'exhaustion', 'verify')


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma separated numbers, got {text!r}.")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma separated integers, got {text!r}.")


def _str_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(',') if v.strip()]


def _parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="jaxslip",
        description="Channel flow with a dynamic slip wall: simulation, constants, attractor bounds and checks.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", type=str, help="flat TOML file of run settings")
        sub.add_argument("--out", dest="out_dir", type=str)
        sub.add_argument("--seed", type=int)
        sub.add_argument("--alpha", type=_float_list, help="comma separated, 'inf' allowed where meaningful")
        sub.add_argument("--beta", type=float)
        sub.add_argument("--nu", type=float)
        sub.add_argument("--L", dest="L", type=float)
        sub.add_argument("--T", dest="T", type=float)
        sub.add_argument("--kappa", type=float)
        sub.add_argument("--dt", type=float)
        sub.add_argument("--fnorm", type=float)
        sub.add_argument("--n-list", dest="n_list", type=_int_list)
        if name == 'simulate':
            sub.add_argument("--plot", action="store_true", help="write a figure of the observer series")
        if name == 'constants':
            sub.add_argument("--discrete", action="store_true", help="also compute the discrete eigenvalue")
        if name == 'tangent':
            sub.add_argument("--trace-n", dest="trace_n", type=_int_list)
            sub.add_argument("--strategies", dest="trace_strategies", type=_str_list)
            sub.add_argument("--burn-in", dest="burn_in", type=float, default=0.,
                             help="max scaled time spent reaching the absorbing ball first")
    return parser.parse_args(argv)


def _config(args: argparse.Namespace, allow_alpha_list: bool = False) -> Tuple[RunConfig, List[float]]:
    alphas = args.alpha
    overrides = dict(out_dir=args.out_dir, seed=args.seed, beta=args.beta, nu=args.nu, L=args.L, T=args.T,
                     kappa=args.kappa, dt=args.dt, fnorm=args.fnorm, n_list=args.n_list)
    for key in ('trace_n', 'trace_strategies'):
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    if alphas is not None:
        if not alphas:
            raise ValueError("Expected at least one alpha.")
        if len(alphas) > 1 and not allow_alpha_list:
            raise ValueError(f"Subcommand {args.command} takes a single alpha, got {alphas}.")
        overrides['alpha'] = alphas[0]
    cfg = load_config(args.config, **overrides)
    os.makedirs(cfg.out_dir, exist_ok=True)
    return cfg, [cfg.alpha] if alphas is None else alphas


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]):
    with open(path, 'w', newline='') as fp:
        writer = csv.writer(fp)
        writer.writerow(header)
        writer.writerows(rows)


def _print_table(header: Sequence[str], rows: Sequence[Sequence]):
    def fmt(v):
        return f"{v:.6g}" if isinstance(v, float) else str(v)

    print(" | ".join(f"{h:>12s}" for h in header))
    for row in rows:
        print(" | ".join(f"{fmt(v):>12s}" for v in row))


def _stepper(problem) -> ChannelStepper:
    return ChannelStepper(params=problem.params, grid=problem.grid, laws=problem.laws, forcing=problem.forcing,
                          cfg=problem.solver)


def _simulate(args: argparse.Namespace) -> int:
    cfg, _ = _config(args)
    problem = build_problem(cfg)
    stepper = _stepper(problem)
    state = initial_state(cfg, problem.grid)
    logger.info(f"Simulating {stepper} to t={problem.params.T}.")
    trajectory = stepper.run_to_time(state, problem.params.T, cadence=cfg.cadence)
    write_series_csv(os.path.join(cfg.out_dir, 'series.csv'), trajectory)
    save_field(os.path.join(cfg.out_dir, 'final.bin'), trajectory.final_state, problem.grid)
    write_field_csv(os.path.join(cfg.out_dir, 'final.csv'), trajectory.final_state, problem.grid)
    r_theory = None
    if cfg.forcing != 'zero':
        report = absorbing_ball_check(trajectory, problem.params, problem.forcing, problem.grid)
        save_results(report, os.path.join(cfg.out_dir, 'absorbing_ball.json'))
        r_theory = report.r_theory
    if args.plot:
        plot_trajectory(trajectory, os.path.join(cfg.out_dir, 'series.png'), r_theory=r_theory)
    summary(trajectory)
    return 0


def _constants(args: argparse.Namespace) -> int:
    cfg, alphas = _config(args, allow_alpha_list=True)
    header = ['alpha', 'mu', 'lambda_sq', 'Lambda']
    if args.discrete:
        header += ['discrete_lambda_sq', 'relative_error']
    rows = []
    for alpha in alphas:
        result = boundary_eigenvalue_mu(alpha)
        row = [alpha, result.mu, result.lambda_sq, capital_lambda(alpha, cfg.beta, cfg.L)]
        if args.discrete:
            grid = build_grid(PhysicalParams(alpha=1., beta=cfg.beta), cfg.n_trunc, cfg.nx, cfg.ny, cfg.x_mode)
            discrete = discrete_lambda_sq(alpha, grid)
            row += [discrete.lambda_sq, abs(discrete.lambda_sq - result.lambda_sq) / result.lambda_sq]
        rows.append(row)
    _write_csv(os.path.join(cfg.out_dir, 'constants.csv'), header, rows)
    _print_table(header, rows)
    return 0


def _dimension(args: argparse.Namespace) -> int:
    cfg, alphas = _config(args, allow_alpha_list=True)
    fnorm = 1. if cfg.fnorm is None else cfg.fnorm
    header = ['alpha', 'beta', 'Lambda', 'bound', 'dirichlet_reference']
    rows = []
    for alpha in alphas:
        params = PhysicalParams(alpha=alpha, beta=cfg.beta, nu=cfg.nu, L=cfg.L, T=cfg.T)
        bound = dimension_bound(params, cfg.kappa, fnorm)
        rows.append([alpha, cfg.beta, bound.lambda_cap, bound.bound, bound.dirichlet_reference])
    _write_csv(os.path.join(cfg.out_dir, 'dimension.csv'), header, rows)
    _print_table(header, rows)
    return 0


def _tangent(args: argparse.Namespace) -> int:
    cfg, _ = _config(args)
    problem = build_problem(cfg)
    stepper = _stepper(problem)
    state = initial_state(cfg, problem.grid)
    if args.burn_in > 0.:
        state, entry_time = burn_in(stepper, state, args.burn_in)
        logger.info(f"Burn-in entered the absorbing ball at t={entry_time}, continuing from t={float(state.t)}.")
    t_end = float(state.t) + problem.params.T
    rows = []
    for strategy in cfg.trace_strategies:
        for N in cfg.trace_n:
            estimate = n_trace_estimate(stepper, state, N, t_end, strategy=strategy, cadence=cfg.cadence,
                                        kappa=cfg.kappa, seed=cfg.seed)
            rows.append([N, estimate.q_empirical, estimate.q_theory, estimate.sigma, strategy])
    header = ['N', 'q_emp', 'q_theory', 'sigma', 'strategy']
    _write_csv(os.path.join(cfg.out_dir, 'tangent.csv'), header, rows)
    _print_table(header, rows)

    direction = random_admissible_field(random.PRNGKey(cfg.seed + 1), problem.grid)
    norm = float(np.sqrt(h_inner(direction, direction, problem.params.beta, problem.grid)))
    direction = direction._replace(u=direction.u / norm, v=direction.v / norm, g=direction.g / norm)
    report = quasidiff_ratios(stepper, state, direction, cfg.epsilons, t_end)
    rows = [[float(e), float(err), float(r)] for e, err, r in zip(report.epsilons, report.errors, report.ratios)]
    _write_csv(os.path.join(cfg.out_dir, 'quasidiff.csv'), ['epsilon', 'error', 'ratio'], rows)
    _print_table(['epsilon', 'error', 'ratio'], rows)
    return 0


def _exhaustion(args: argparse.Namespace) -> int:
    cfg, _ = _config(args)
    report = run_exhaustion(cfg)
    rows = [[n, float(e)] for n, e in zip(report.n_list, report.errors)]
    _write_csv(os.path.join(cfg.out_dir, 'exhaustion.csv'), ['n', 'error'], rows)
    save_results(report, os.path.join(cfg.out_dir, 'exhaustion.json'))
    _print_table(['n', 'error'], rows)
    return 0


def _verify(args: argparse.Namespace) -> int:
    cfg, _ = _config(args)
    report = run_verification_suite(cfg, save_file=os.path.join(cfg.out_dir, 'verify.json'))
    verification_summary(report)
    return 0 if report.passed else 1


_HANDLERS = dict(
    simulate=_simulate,
    constants=_constants,
    dimension=_dimension,
    tangent=_tangent,
    exhaustion=_exhaustion,
    verify=_verify
)


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point. Returns 2 on usage errors, 1 on numerical failures or failed verification and 0 otherwise.
    """
    try:
        args = _parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return _HANDLERS[args.command](args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ConvergenceError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 1


def main():
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
