from typing import NamedTuple, Optional, Union, Callable, Tuple, List, Dict, Any

import jax
from jax import numpy as jnp

__all__ = [
    'PhysicalParams',
    'Grid',
    'Field',
    'FlowState',
    'TangentState',
    'Forcing',
    'NormReport',
    'StressLaw',
    'SlipLaw',
    'Laws',
    'ConditionReport',
    'SolverConfig',
    'StepDiagnostics',
    'TrajectorySummary',
    'DifferenceEnergy',
    'EigenResult',
    'DiscreteEigenResult',
    'InequalityReport',
    'ReflectionExtension',
    'TangentFamily',
    'TraceEstimate',
    'DimensionBound',
    'AbsorbingBallReport',
    'QuasiDiffReport',
    'ExhaustionReport',
    'CheckResult',
    'VerificationReport',
    'PRNGKey',
    'IntArray',
    'FloatArray',
    'BoolArray',
    'float_type',
    'int_type',
    'X_MODES',
    'CONVECTION_SCHEMES',
    'PRESSURE_SOLVERS',
]

float_type = jnp.result_type(float)
int_type = jnp.result_type(int)

PRNGKey = jax.Array
FloatArray = Union[jax.Array, float]
IntArray = Union[jax.Array, int]
BoolArray = Union[jax.Array, bool]

X_MODES = ('dirichlet_ends', 'periodic')
CONVECTION_SCHEMES = ('skew_symmetric', 'divergence_form', 'none')
PRESSURE_SOLVERS = ('diagonalisation', 'cg')


class PhysicalParams(NamedTuple):
    """
    Physical parameters of the channel problem.

    Args:
        alpha: boundary slip coefficient
        beta: boundary inertia coefficient
        nu: kinematic viscosity
        L: channel width
        T: final time
    """
    alpha: float
    beta: float
    nu: float = 1.
    L: float = 1.
    T: float = 1.


class Grid(NamedTuple):
    """
    Staggered (MAC) grid on (-n_trunc, n_trunc) x (0, height).

    Storage layout:
        u: [nux, ny] on vertical faces x_i = -n_trunc + i*dx, cell-centred in y.
        v: [nx, ny + 1] on horizontal faces y_j = j*dy, cell-centred in x.
        g: [nux] slip velocity at the bottom wall, co-located with u in x.
        p: [nx, ny] at cell centres.

    In dirichlet_ends mode nux = nx + 1 and both end faces carry zero velocity. In periodic mode nux = nx and
    face nx wraps onto face 0.
    """
    n_trunc: int
    nx: int
    ny: int
    dx: float
    dy: float
    x_mode: str = 'dirichlet_ends'
    height: float = 1.

    @property
    def periodic(self) -> bool:
        return self.x_mode == 'periodic'

    @property
    def nux(self) -> int:
        return self.nx if self.periodic else self.nx + 1


class Field(NamedTuple):
    """
    A velocity field with its wall slip trace. Also used for forcing (f, h) and tangent vectors.
    """
    u: FloatArray  # [nux, ny]
    v: FloatArray  # [nx, ny + 1]
    g: FloatArray  # [nux]


class FlowState(NamedTuple):
    """
    Discrete (u, g, p) at time t, plus the convective history needed by the multistep scheme.
    """
    u: FloatArray  # [nux, ny]
    v: FloatArray  # [nx, ny + 1]
    g: FloatArray  # [nux]
    p: FloatArray  # [nx, ny]
    t: FloatArray
    conv: Field  # convective term at the previous level, weighted form
    num_steps: IntArray

    @property
    def field(self) -> Field:
        return Field(u=self.u, v=self.v, g=self.g)


class TangentState(NamedTuple):
    """
    Linearised state: U = (u, v), slip trace g_U = g and pressure sigma.
    """
    u: FloatArray
    v: FloatArray
    g: FloatArray
    sigma: FloatArray
    t: FloatArray
    conv: Field

    @property
    def field(self) -> Field:
        return Field(u=self.u, v=self.v, g=self.g)


class Forcing(NamedTuple):
    """
    Body force f(t, x, y) -> (f1, f2) on the channel and boundary force h(t, x) -> h1 on the slip wall.

    Both callables must be traceable by JAX. Either may be None, meaning zero.
    """
    f: Optional[Callable[[FloatArray, FloatArray, FloatArray], Tuple[FloatArray, FloatArray]]] = None
    h: Optional[Callable[[FloatArray, FloatArray], FloatArray]] = None
    time_dependent: bool = False


class NormReport(NamedTuple):
    l2_omega: FloatArray
    l2_gamma: FloatArray
    grad_l2: FloatArray
    symgrad_l2: FloatArray
    v_norm: FloatArray
    h_norm: FloatArray
    l4_omega: FloatArray


class StressLaw(NamedTuple):
    """
    Interior constitutive law S(D).

    Args:
        kind: 'linear' (S = 2 nu D) or 'shear_dependent' (S = viscosity(|D|^2) D)
        nu: viscosity for the linear kind
        c1: coercivity constant
        c2: growth constant
        c3: derivative coercivity constant
        viscosity: callable s -> nu(s), required for the shear_dependent kind
        nu_min: lower bound of viscosity
        nu_max: upper bound of viscosity
    """
    kind: str
    nu: float
    c1: float
    c2: float
    c3: float
    viscosity: Optional[Callable[[FloatArray], FloatArray]] = None
    nu_min: Optional[float] = None
    nu_max: Optional[float] = None


class SlipLaw(NamedTuple):
    """
    Boundary law s(u) acting on wall velocities (2-vectors).
    """
    kind: str
    nu: float
    c1: float
    c2: float
    c3: float
    function: Optional[Callable[[FloatArray], FloatArray]] = None


class Laws(NamedTuple):
    stress: StressLaw
    slip: SlipLaw


class ConditionReport(NamedTuple):
    law_kind: str
    sample_count: int
    min_coercivity_ratio: float
    max_growth_ratio: float
    min_derivative_ratio: float
    coercivity_ok: bool
    growth_ok: bool
    derivative_ok: bool
    passed: bool


class SolverConfig(NamedTuple):
    """
    Time stepping controls.

    Args:
        dt: time step
        div_tol: max-norm tolerance on the discrete divergence after projection
        convection_scheme: 'skew_symmetric', 'divergence_form' or 'none' (test mode)
        theta: diffusion implicitness, 0.5 is Crank-Nicolson and 1 is backward Euler
        pressure_solver: 'diagonalisation' (direct) or 'cg'
        linear_tol: relative tolerance of the Krylov solves
        newton_tol: relative tolerance of the Newton iteration
        newton_maxiter: max Newton iterations per step
        linear_maxiter: max Krylov iterations per solve
    """
    dt: float
    div_tol: float = 1e-10
    convection_scheme: str = 'skew_symmetric'
    theta: float = 1.
    pressure_solver: str = 'diagonalisation'
    linear_tol: float = 1e-12
    newton_tol: float = 1e-10
    newton_maxiter: int = 20
    linear_maxiter: int = 5000


class StepDiagnostics(NamedTuple):
    newton_iterations: IntArray
    newton_residual: FloatArray  # relative
    converged: BoolArray
    div_residual: FloatArray
    pressure_residual: FloatArray  # relative
    energy_residual: FloatArray


class TrajectorySummary(NamedTuple):
    """
    Observer series of a run, sampled every `cadence` steps.
    """
    times: FloatArray  # [S]
    norms: NormReport  # each [S]
    div_residual: FloatArray  # [S]
    energy_residual: FloatArray  # [S]
    final_state: FlowState
    snapshots: Optional[FlowState]  # leading dim [S] when stored
    cadence: int
    extras: Optional[Dict[str, FloatArray]] = None  # custom observer series


class DifferenceEnergy(NamedTuple):
    times: FloatArray
    w_h_sq: FloatArray  # ||w(t)||_H^2
    w_v_int: FloatArray  # int_0^t ||w||_V^2


class EigenResult(NamedTuple):
    mu: float
    lambda_sq: float
    bracket: Tuple[float, float]
    residual: float  # |mu cos mu + 8 alpha sin mu| / (1 + 8 alpha)


class DiscreteEigenResult(NamedTuple):
    alpha: float
    lambda_sq: float  # smallest Rayleigh quotient on the truncated strip
    lambda_sq_y: float  # the cross-channel part
    truncation_shift: float  # the x part, vanishes as n_trunc grows
    n_trunc: int
    ny: int


class InequalityReport(NamedTuple):
    name: str
    analytic_constant: float
    worst_observed_ratio: float
    sample_count: int
    passed: bool


class ReflectionExtension(NamedTuple):
    field: Field
    grid: Grid
    d_ratio: float  # ||D Eu||^2 / ||Du||^2, at most 4
    l2_ratio: float  # ||Eu||^2 / ||u||^2, at most 4
    w12_ratio: float  # ||Eu||_{W12}^2 / ||Du||^2, at most 64
    holds: bool


class TangentFamily(NamedTuple):
    phis: Field  # leading dimension N
    N: int


class TraceEstimate(NamedTuple):
    N: int
    q_empirical: float
    q_theory: float
    sigma: float
    strategy: str
    kappa: float
    lambda_cap: float
    forcing_h_norm: float
    passed: bool


class DimensionBound(NamedTuple):
    kappa: float
    lambda_cap: float
    forcing_h_norm: float
    bound: float
    dirichlet_reference: float


class AbsorbingBallReport(NamedTuple):
    r_theory: float
    delta: float
    entry_time: float  # inf when never entered
    entered: bool
    violations: int  # samples above (1 + delta) R after entry
    monotonicity_violations: int  # increases while outside (1 + delta) R


class QuasiDiffReport(NamedTuple):
    epsilons: FloatArray
    errors: FloatArray
    ratios: FloatArray
    decreasing: bool
    floor: float


class ExhaustionReport(NamedTuple):
    n_list: List[int]
    errors: FloatArray
    ref_n: int
    nonincreasing: bool


class CheckResult(NamedTuple):
    name: str
    passed: bool
    details: Dict[str, Any]


class VerificationReport(NamedTuple):
    checks: List[CheckResult]
    failed_mask: int
    passed: bool
