"""Global Picard iteration for multi-order Caputo fractional systems."""

from .boundary import HLSpec, nonuniqueness_demo, unboundedness_demo
from .config import Config, dump_config, load_config, parse_config
from .contraction import (
    ContractionParams,
    ContractionReport,
    GateResult,
    GateStatus,
    c_n,
    derive_beta,
    find_n0,
    multiorder_M,
    ratio,
    validity_gate,
)
from .errors import (
    ConfigError,
    DomainError,
    EvaluationError,
    FracPicardError,
    HypothesisError,
    RangeError,
    ShapeError,
)
from .fracgrid import Grid, GridFunction, from_csv, lp_norm, make_grid, sup_norm_diff, to_csv
from .fracint import QuadratureRule, WeightTable, build_weights, caputo_l1, rl_integral, rl_integral_direct
from .picard import GateRejected, ProblemSpec, SolveReport, adams_pc_solve, picard_solve, residual_check
from .rhs import CaratheodoryRHS, catalog, check_growth, check_lipschitz
from .specfun import MLParams, gamma, log_gamma, mittag_leffler, wendel_check

__version__ = "0.1.0"
