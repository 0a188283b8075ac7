"""Riesz interaction energies, their Gamma-limits and the associated flows on grids."""

__version__ = "0.1.0"

from .convolve import ConvolutionPlan, convolve, make_plan, operator_norm_bound, plan_for
from .errors import (
    ConfigError,
    EmptyDomainError,
    InputError,
    QuadratureError,
    RieszFlowError,
    SolverError,
)
from .flows import (
    FlowProblem,
    FlowTrajectory,
    closed_form_average,
    closed_form_decay,
    compare_trajectories,
    solve,
    step,
)
from .functionals import (
    ConvexityCertificate,
    EnergyKind,
    certify,
    counterexample_sequence,
    energy,
    h00_norm,
)
from .grid import (
    Ball,
    CellList,
    Domain,
    FullBox,
    GridField,
    build_domain,
    gamma_fn,
    inner_product,
    load_field,
    save_field,
)
from .kernels import KernelSpec, KernelTable, build_table, check_fourier_identity, eval_kernel
from .operators import OperatorKind, apply, gradient_check
