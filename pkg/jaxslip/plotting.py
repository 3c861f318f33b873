from typing import Optional

import numpy as np
import pylab as plt

from jaxslip.internals.types import TrajectorySummary

__all__ = ['plot_trajectory']


def plot_trajectory(trajectory: TrajectorySummary, save_name: Optional[str] = None, r_theory: Optional[float] = None):
    """
    Plot the observer series of a run: H and V norms, divergence residual and energy residual.
    Figures go to file only.

    Args:
        trajectory: observer series
        save_name: file to save figure to, nothing is drawn when None
        r_theory: absorbing-ball radius to overlay on the H-norm panel
    """
    if save_name is None:
        return
    times = np.asarray(trajectory.times)
    if times.size == 0:
        raise ValueError("Expected a nonempty trajectory.")
    fig, axs = plt.subplots(4, 1, sharex=True, figsize=(8, 10))
    axs[0].plot(times, np.asarray(trajectory.norms.h_norm), c='black')
    if r_theory is not None:
        axs[0].axhline(r_theory, c='red', ls='dashed', label='absorbing radius')
        axs[0].legend()
    axs[0].set_ylabel(r'$\|u\|_H$')
    axs[1].plot(times, np.asarray(trajectory.norms.v_norm), c='black')
    axs[1].set_ylabel(r'$\|u\|_V$')
    axs[2].semilogy(times, np.maximum(np.asarray(trajectory.div_residual), 1e-300), c='black')
    axs[2].set_ylabel(r'$\max|\mathrm{div}\, u|$')
    axs[3].plot(times, np.asarray(trajectory.energy_residual), c='black')
    axs[3].set_ylabel('energy residual')
    axs[3].set_xlabel(r'$t$')
    fig.savefig(save_name, bbox_inches='tight', dpi=150, pad_inches=0.0)
    plt.close(fig)
