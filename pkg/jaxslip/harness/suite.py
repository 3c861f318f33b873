import os
from typing import Callable, Dict, List, Optional, Tuple, Any

import numpy as np
from jax import random

from jaxslip.attractor.dimension import dimension_bound, dimension_bound_nondimensional
from jaxslip.attractor.energy import energy_residual_order
from jaxslip.attractor.family import random_family
from jaxslip.attractor.tangent import quasidiff_ratios
from jaxslip.attractor.trace import n_trace_estimate
from jaxslip.constants.eigenvalue import boundary_eigenvalue_mu
from jaxslip.constants.inequalities import verify_korn_suite, verify_extension_suite, verify_ladyzhenskaya, \
    verify_suborthonormal
from jaxslip.constitutive.conditions import validate_conditions
from jaxslip.core.fields import h_inner
from jaxslip.errors import ConvergenceError
from jaxslip.harness.config import RunConfig, Problem, build_problem, initial_state
from jaxslip.internals.logging import logger
from jaxslip.internals.random import random_admissible_field, random_admissible_fields
from jaxslip.internals.types import CheckResult, VerificationReport, InequalityReport
from jaxslip.solver.stepper import ChannelStepper
from jaxslip.utils import VERIFICATION_CHECKS, failed_checks, save_results

__all__ = [
    'MU_TABLE',
    'MU_TOL',
    'QUASIDIFF_REDUCTION',
    'run_verification_suite'
]

# smallest roots of mu cos(mu) + 8 alpha sin(mu) = 0, six decimals
MU_TABLE = {0.: 0.5 * np.pi, 0.1: 1.958575, 1.: 2.804425, 10.: 3.102827, float('inf'): np.pi}
MU_TOL = 5e-4
MIN_ENERGY_ORDER_RATIO = 1.8
QUASIDIFF_REDUCTION = 0.1
BETA_SWEEP = (0., 1e-2, 1e-1, 1., 10., 100., 1e4)
BETA_DIVERGENCE_FACTOR = 1e3


def _inequality_details(reports: List[InequalityReport]) -> Dict[str, Any]:
    return {r.name: dict(constant=r.analytic_constant, worst=r.worst_observed_ratio, passed=r.passed)
            for r in reports}


def _stepper(problem: Problem, dt: Optional[float] = None) -> ChannelStepper:
    solver = problem.solver if dt is None else problem.solver._replace(dt=dt)
    return ChannelStepper(params=problem.params, grid=problem.grid, laws=problem.laws, forcing=problem.forcing,
                          cfg=solver)


def _check_constitutive(cfg: RunConfig, problem: Problem) -> Tuple[bool, Dict[str, Any]]:
    details = {}
    for name, law in problem.laws._asdict().items():
        report = validate_conditions(law, sample_count=cfg.sample_count, rng_seed=cfg.seed)
        details[name] = report
    return all(r.passed for r in details.values()), details


def _check_mu_table(cfg: RunConfig, problem: Problem) -> Tuple[bool, Dict[str, Any]]:
    details = {}
    passed = True
    for alpha, mu_ref in MU_TABLE.items():
        mu = boundary_eigenvalue_mu(alpha).mu
        ok = abs(mu - mu_ref) <= MU_TOL
        passed &= ok
        details[str(alpha)] = dict(mu=mu, reference=mu_ref, passed=ok)
    return passed, details


def _check_energy_order(cfg: RunConfig, problem: Problem) -> Tuple[bool, Dict[str, Any]]:
    state = initial_state(cfg, problem.grid)
    t_end = min(problem.params.T, 20. * cfg.dt)
    ratio, order = energy_residual_order(_stepper(problem), _stepper(problem, 0.5 * cfg.dt), state, t_end)
    return ratio >= MIN_ENERGY_ORDER_RATIO, dict(ratio=ratio, order=order, dt=cfg.dt, t_end=t_end)


def _check_divergence(cfg: RunConfig, problem: Problem) -> Tuple[bool, Dict[str, Any]]:
    trajectory = _stepper(problem).run_to_time(initial_state(cfg, problem.grid), problem.params.T,
                                               cadence=cfg.cadence)
    worst = float(np.max(np.asarray(trajectory.div_residual)))
    return worst <= cfg.div_tol, dict(max_div_residual=worst, div_tol=cfg.div_tol)


def _check_quasidiff(cfg: RunConfig, problem: Problem) -> Tuple[bool, Dict[str, Any]]:
    stepper = _stepper(problem)
    direction = random_admissible_field(random.PRNGKey(cfg.seed + 1), problem.grid)
    norm = float(np.sqrt(h_inner(direction, direction, problem.params.beta, problem.grid)))
    direction = direction._replace(u=direction.u / norm, v=direction.v / norm, g=direction.g / norm)
    report = quasidiff_ratios(stepper, initial_state(cfg, problem.grid), direction, cfg.epsilons,
                              problem.params.T)
    exact = float(np.max(report.errors)) <= 1e-9
    reduced = exact or report.ratios[-1] <= QUASIDIFF_REDUCTION * report.ratios[0]
    return bool(report.decreasing and reduced), dict(report=report)


def _check_trace(cfg: RunConfig, problem: Problem) -> Tuple[bool, Dict[str, Any]]:
    stepper = _stepper(problem)
    state = initial_state(cfg, problem.grid)
    estimates = []
    for strategy in cfg.trace_strategies:
        for N in cfg.trace_n:
            estimates.append(n_trace_estimate(stepper, state, N, problem.params.T, strategy=strategy,
                                              cadence=cfg.cadence, kappa=cfg.kappa, seed=cfg.seed))
    return all(e.passed for e in estimates), dict(estimates=estimates)


def _check_bound_monotonicity(cfg: RunConfig, problem: Problem) -> Tuple[bool, Dict[str, Any]]:
    params = problem.physical_params
    bounds = np.asarray([dimension_bound(params._replace(beta=beta), cfg.kappa).bound for beta in BETA_SWEEP])
    monotone = bool(np.all(np.diff(bounds) >= -1e-12 * bounds[1:]))
    diverging = bool(bounds[-1] > BETA_DIVERGENCE_FACTOR * bounds[0])
    limit = dimension_bound(params._replace(alpha=float('inf')), cfg.kappa).bound
    limit_ok = bool(np.isclose(bounds[0], limit, rtol=1e-12))
    physical = dimension_bound(params, cfg.kappa).bound
    scaled = dimension_bound_nondimensional(params, cfg.kappa).bound
    round_trip = bool(abs(physical - scaled) <= 1e-12 * abs(physical))
    details = dict(betas=list(BETA_SWEEP), bounds=bounds, monotone=monotone, diverging=diverging,
                   alpha_limit=limit_ok, round_trip=round_trip)
    return monotone and diverging and limit_ok and round_trip, details


def run_verification_suite(cfg: RunConfig, save_file: Optional[str] = None) -> VerificationReport:
    """
    Run every verification check on the configured problem and aggregate the verdicts.

    Each check runs even when others fail; a check that raises ConvergenceError counts as failed with the
    residual recorded. Bit i of failed_mask is set when check i of VERIFICATION_CHECKS failed.

    Args:
        cfg: run configuration
        save_file: JSON file for the report, defaults to <out_dir>/verify.json; '' disables saving

    Returns:
        VerificationReport
    """
    problem = build_problem(cfg)
    grid, params = problem.grid, problem.params
    fields = random_admissible_fields(random.PRNGKey(cfg.seed), grid, cfg.sample_count)
    N = max(cfg.trace_n)
    family = random_family(random.PRNGKey(cfg.seed + 2), N, params.beta, grid)
    xi = random.normal(random.PRNGKey(cfg.seed + 3), (cfg.sample_count, N))

    def korn(*_):
        reports = verify_korn_suite(params, grid, fields=fields)
        return all(r.passed for r in reports), _inequality_details(reports)

    def extension(*_):
        reports = verify_extension_suite(grid, fields=fields)
        return all(r.passed for r in reports), _inequality_details(reports)

    def ladyzhenskaya(*_):
        report = verify_ladyzhenskaya(fields, params, grid)
        return report.passed, _inequality_details([report])

    def suborthonormal(*_):
        report = verify_suborthonormal(family, xi, grid)
        return report.passed, _inequality_details([report])

    checks: Dict[str, Callable[[RunConfig, Problem], Tuple[bool, Dict[str, Any]]]] = dict(
        constitutive=_check_constitutive,
        korn=korn,
        extension=extension,
        ladyzhenskaya=ladyzhenskaya,
        suborthonormal=suborthonormal,
        mu_table=_check_mu_table,
        energy_order=_check_energy_order,
        divergence=_check_divergence,
        quasidiff=_check_quasidiff,
        trace=_check_trace,
        bound_monotonicity=_check_bound_monotonicity
    )
    results = []
    failed_mask = 0
    for bit, name in enumerate(VERIFICATION_CHECKS):
        try:
            passed, details = checks[name](cfg, problem)
        except ConvergenceError as e:
            passed, details = False, dict(error=str(e), residual=e.residual)
        passed = bool(passed)
        if not passed:
            failed_mask |= 1 << bit
        logger.info(f"Verification check {name}: {'pass' if passed else 'FAIL'}")
        results.append(CheckResult(name=name, passed=passed, details=details))
    report = VerificationReport(checks=results, failed_mask=failed_mask, passed=failed_mask == 0)
    if not report.passed:
        logger.warning(f"Verification failed: {', '.join(failed_checks(failed_mask))}")
    if save_file is None:
        os.makedirs(cfg.out_dir, exist_ok=True)
        save_file = os.path.join(cfg.out_dir, 'verify.json')
    if save_file:
        save_results(report, save_file)
    return report
