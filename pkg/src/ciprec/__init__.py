"""Symbol-level precoding with constructive interference for MU-MISO downlinks.

Closed-form and iterative solutions of the per-symbol dual problem, ZF/RZF
baselines, reference QP solvers and a Monte Carlo harness.
"""
from .channel import Channel
from .errors import (
    BadDimensions,
    BadParameter,
    CiError,
    ConfigError,
    DegenerateDual,
    NotConverged,
    NotPositiveDefinite,
    SelectorExhausted,
    TooLarge,
    UnsupportedModulation,
    UnsupportedOrder,
)
from .geometry import (
    NONSTRICT,
    STRICT,
    CiKernel,
    DualSolution,
    beamformer_from_dual,
    build_kernel,
    build_kernel_nonstrict,
    build_kernel_strict,
    kkt_residuals,
)
from .harness import SimConfig, run_ber_sweep, run_iteration_stats, run_timing, run_tradeoff
from .iterative import IterativeResult, classify, solve_iterative, solve_with_budget
from .qp import SimplexQp, project_simplex, solve_active_set_enum, solve_projected_gradient
from .signal_model import Constellation, constellation_by_name, make_constellation
from .zf import Beamformer, rzf_precode, zf_precode

__version__ = "0.1.0"
