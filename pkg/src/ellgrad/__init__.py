"""ellgrad: desk verification of gradient bounds for Delta u + u h(ln u) = 0.

The package parses and differentiates the nonlinearity h, checks the
admissibility systems it must satisfy, evaluates the explicit bound
constants, solves the radial reduction on constant-curvature model
manifolds, and compares the resulting profiles against the bounds,
oscillation factors and decay scans. Hot kernels run through a compiled
extension when available (see ellgrad.backend).
"""

__version__ = "0.1.0"

from .backend import active_backend, available_backends, get_backend
from .bounds import (
    BoundReport,
    CutoffConstants,
    ProblemSpec,
    SolutionRange,
    bound_case1,
    bound_case2,
    bound_general,
    compute_A,
    compute_L,
    harnack_factor,
    solution_range_from_bound,
)
from .conditions import (
    ConditionReport,
    check_corollary,
    check_system,
    find_lambda,
)
from .geometry import ManifoldModel, drift, make_model, warp
from .hexpr import (
    EvalDomainError,
    ExprSyntaxError,
    Expression,
    NonLiteralExponentError,
    ParameterBindingError,
    Program,
    UnknownFunctionError,
    compile_program,
    differentiate,
    evaluate,
    parameters,
    parse,
    to_text,
)
from .solver import RadialSolution, log_gradient, residual_max, solve_radial
from .verify import (
    VerificationReport,
    compute_G,
    liouville_scan,
    max_rel_spread,
    verify_gradient_bound,
    verify_harnack,
)

__all__ = [
    "__version__",
    "active_backend",
    "available_backends",
    "get_backend",
    "BoundReport",
    "CutoffConstants",
    "ProblemSpec",
    "SolutionRange",
    "bound_case1",
    "bound_case2",
    "bound_general",
    "compute_A",
    "compute_L",
    "harnack_factor",
    "solution_range_from_bound",
    "ConditionReport",
    "check_corollary",
    "check_system",
    "find_lambda",
    "ManifoldModel",
    "drift",
    "make_model",
    "warp",
    "EvalDomainError",
    "ExprSyntaxError",
    "Expression",
    "NonLiteralExponentError",
    "ParameterBindingError",
    "Program",
    "UnknownFunctionError",
    "compile_program",
    "differentiate",
    "evaluate",
    "parameters",
    "parse",
    "to_text",
    "RadialSolution",
    "log_gradient",
    "residual_max",
    "solve_radial",
    "VerificationReport",
    "compute_G",
    "liouville_scan",
    "max_rel_spread",
    "verify_gradient_bound",
    "verify_harnack",
]
