from typing import Optional

from jaxslip.constitutive.laws import linear_laws
from jaxslip.core.fields import zero_state
from jaxslip.core.grid import build_grid
from jaxslip.core.scaling import nondimensionalize
from jaxslip.harness.forcing import zero_forcing
from jaxslip.internals.logging import logger
from jaxslip.internals.types import PhysicalParams, Grid, Laws, Forcing, SolverConfig, FlowState, TrajectorySummary
from jaxslip.plotting import plot_trajectory
from jaxslip.solver.stepper import ChannelStepper
from jaxslip.utils import summary, save_results, load_results

__all__ = [
    'DefaultChannelSolver'
]


class DefaultChannelSolver:
    """
    Channel flow with the dynamic slip wall, set up from physical data with robust defaults.
    The run happens in scaled variables (unit channel, nu = 1).
    """

    def __init__(self, params: PhysicalParams,
                 forcing: Optional[Forcing] = None,
                 laws: Optional[Laws] = None,
                 n_trunc: int = 2,
                 cells_per_unit: int = 8,
                 ny: int = 16,
                 x_mode: str = 'dirichlet_ends',
                 dt: Optional[float] = None,
                 theta: float = 1.,
                 convection_scheme: str = 'skew_symmetric'):
        """
        Initialises the solver.

        Args:
            params: physical parameters
            forcing: physical forcing, zero by default
            laws: constitutive laws of the scaled problem, linear by default
            n_trunc: half-length of the truncated channel in units of L
            cells_per_unit: cells per unit length in x
            ny: cells across the channel
            x_mode: 'dirichlet_ends' or 'periodic'
            dt: scaled time step, defaults to min(dy, T*/100)
            theta: implicitness of diffusion, in [0.5, 1]
            convection_scheme: one of CONVECTION_SCHEMES
        """
        if cells_per_unit < 1:
            raise ValueError(f"Expected cells_per_unit >= 1, got {cells_per_unit}")
        self._physical_params = params
        self._params, self._forcing = nondimensionalize(params, zero_forcing() if forcing is None else forcing)
        self._grid = build_grid(params, n_trunc, 2 * n_trunc * cells_per_unit, ny, x_mode)
        if dt is None:
            dt = min(self._grid.dy, self._params.T / 100.)
        self._laws = linear_laws(1.) if laws is None else laws
        self._stepper = ChannelStepper(params=self._params, grid=self._grid, laws=self._laws, forcing=self._forcing,
                                       cfg=SolverConfig(dt=dt, theta=theta, convection_scheme=convection_scheme))

        # Post-analysis utilities
        self.summary = summary
        self.plot_trajectory = plot_trajectory
        self.save_results = save_results
        self.load_results = load_results

    def __repr__(self):
        return f"DefaultChannelSolver(params={self._physical_params}, grid={self._grid})"

    @property
    def params(self) -> PhysicalParams:
        return self._params

    @property
    def grid(self) -> Grid:
        return self._grid

    @property
    def stepper(self) -> ChannelStepper:
        return self._stepper

    def __call__(self, state: Optional[FlowState] = None, t_end: Optional[float] = None, cadence: int = 1,
                 store_snapshots: bool = False) -> TrajectorySummary:
        """
        Runs the scaled problem.

        Args:
            state: initial state, at rest by default
            t_end: scaled end time, defaults to the scaled T
            cadence: steps between observations
            store_snapshots: whether to keep the sampled states

        Returns:
            observer series
        """
        if state is None:
            state = zero_state(self._grid)
        if t_end is None:
            t_end = self._params.T
        logger.info(f"Running {self._stepper} to t={t_end}.")
        return self._stepper.run_to_time(state, t_end, cadence=cadence, store_snapshots=store_snapshots)
