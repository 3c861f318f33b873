import io
import json
import os
import warnings
from typing import NamedTuple, Optional, TextIO, Union

import numpy as np

from jaxslip.internals.namedtuple_utils import serialise_namedtuple, deserialise_namedtuple, isinstance_namedtuple
from jaxslip.internals.types import TrajectorySummary, VerificationReport

__all__ = [
    'VERIFICATION_CHECKS',
    'failed_checks',
    'summary',
    'verification_summary',
    'save_pytree',
    'save_results',
    'load_pytree',
    'load_results'
]

# bit order of VerificationReport.failed_mask
VERIFICATION_CHECKS = (
    'constitutive',
    'korn',
    'extension',
    'ladyzhenskaya',
    'suborthonormal',
    'mu_table',
    'energy_order',
    'divergence',
    'quasidiff',
    'trace',
    'bound_monotonicity'
)


def _bit_mask(int_mask, width=8):
    """
    Bits of `int_mask`, least significant first (3 -> [1, 1, 0, ...]).
    """
    return [(int_mask >> i) & 1 for i in range(width)]


def failed_checks(failed_mask: int):
    """
    Names of the verification checks whose bit is set in `failed_mask`.
    """
    bits = _bit_mask(int(failed_mask), width=len(VERIFICATION_CHECKS))
    return [name for bit, name in zip(bits, VERIFICATION_CHECKS) if bit]


class _Lines:
    """
    Echoes lines to stdout and keeps them for an optional file target.
    """

    def __init__(self):
        self.lines = []

    def __call__(self, line: str = "--------"):
        print(line)
        self.lines.append(line)

    def write(self, f_obj: Optional[Union[str, TextIO]]):
        if f_obj is not None:
            _write("\n".join(self.lines), f_obj)


def _write(out: str, f_obj: Union[str, TextIO]):
    if isinstance(f_obj, str):
        with open(f_obj, 'w') as f:
            f.write(out)
    elif isinstance(f_obj, io.TextIOBase):
        f_obj.write(out)
    else:
        raise TypeError(f"Invalid f_obj: {type(f_obj)}")


def summary(trajectory: TrajectorySummary, f_obj: Optional[Union[str, TextIO]] = None):
    """
    Gives a summary of a run.

    Args:
        trajectory: observer series of a run
        f_obj: file-like object to write summary to. If None, prints to stdout.
    """
    _print = _Lines()
    times = np.asarray(trajectory.times)
    _print()
    if times.size == 0:
        _print("Empty run.")
        _print()
        _print.write(f_obj)
        return
    h_norm = np.asarray(trajectory.norms.h_norm)
    v_norm = np.asarray(trajectory.norms.v_norm)
    _print(f"steps: {int(trajectory.final_state.num_steps):d}")
    _print(f"samples: {times.size:d} (every {trajectory.cadence:d} steps)")
    _print(f"t: {times[0]:.4g} -> {times[-1]:.4g}")
    _print()
    _print(f"||u||_H: {h_norm[0]:.6g} -> {h_norm[-1]:.6g} (max {np.max(h_norm):.6g})")
    _print(f"||u||_V: {v_norm[0]:.6g} -> {v_norm[-1]:.6g} (max {np.max(v_norm):.6g})")
    _print(f"max |div u|: {np.max(np.asarray(trajectory.div_residual)):.3e}")
    _print(f"max |energy residual|: {np.max(np.abs(np.asarray(trajectory.energy_residual))):.3e}")
    if trajectory.extras:
        for name, series in trajectory.extras.items():
            series = np.asarray(series)
            _print(f"{name}: {series[0]:.6g} -> {series[-1]:.6g}")
    _print()
    _print.write(f_obj)


def verification_summary(report: VerificationReport, f_obj: Optional[Union[str, TextIO]] = None):
    """
    Table of the verification checks, followed by the failed ones decoded from the bit mask.
    """
    _print = _Lines()
    _print()
    for check in report.checks:
        _print(f"{check.name:<20s} {'pass' if check.passed else 'FAIL'}")
    _print()
    if report.passed:
        _print("All checks passed.")
    else:
        _print("Failed:")
        for name in failed_checks(report.failed_mask):
            _print(f"  {name}")
    _print()
    _print.write(f_obj)


def save_pytree(pytree: NamedTuple, save_file: Union[str, os.PathLike]):
    if not isinstance_namedtuple(pytree):
        raise ValueError(f"Expected a NamedTuple report or state, got {type(pytree)}")
    with open(save_file, "w") as fp:
        json.dump(serialise_namedtuple(pytree), fp, indent=2)


def save_results(results: NamedTuple, save_file: Union[str, os.PathLike]):
    """
    Saves a report, run summary or config as tagged JSON. Callables are dropped.
    """
    if os.path.splitext(str(save_file))[1].lower() != ".json":
        warnings.warn(f"Saving {save_file} as JSON without a .json extension.")
    save_pytree(results, save_file)


def load_pytree(save_file: Union[str, os.PathLike]):
    with open(save_file) as fp:
        return deserialise_namedtuple(json.load(fp))


def load_results(save_file: Union[str, os.PathLike]):
    """
    Loads a saved report from a json file. Arrays come back as numpy arrays, analytic callables as None.
    """
    return load_pytree(save_file)
