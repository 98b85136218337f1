"""Solvers for y*exp(exp(y)) = X and the generalized y**p * exp(exp(y)) = X.

The top-level namespace re-exports the everyday API; the submodules hold
the rest (oracle cross-checks, equation-shape transforms, convergence
diagnostics, the bundled reference tables, and the command-line front end).
"""

from .core import (
    DomainError,
    NFuncError,
    NoRealRoot,
    QuadraticCoeffs,
    RootBranch,
    Scalar,
    log_ratio_approx,
    quadratic_root,
)
from .general import (
    Branch,
    GeneralProblem,
    NoSolutionOnBranch,
    ProblemForm,
    general_forward,
    general_solve,
    general_step,
    general_step_negative_exp,
)
from .solvers import (
    PRECISION_LIMIT_X,
    IterationStep,
    SolveConfig,
    SolveResult,
    SolveStatus,
    forward,
    forward_negative,
    nfunc,
    solve_method1,
    solve_method2,
    solve_method3,
    step_method1,
    step_method2,
    step_method3,
)

__version__ = "1.0.0"

__all__ = [
    "Branch",
    "DomainError",
    "GeneralProblem",
    "IterationStep",
    "NFuncError",
    "NoRealRoot",
    "NoSolutionOnBranch",
    "PRECISION_LIMIT_X",
    "ProblemForm",
    "QuadraticCoeffs",
    "RootBranch",
    "Scalar",
    "SolveConfig",
    "SolveResult",
    "SolveStatus",
    "forward",
    "forward_negative",
    "general_forward",
    "general_solve",
    "general_step",
    "general_step_negative_exp",
    "log_ratio_approx",
    "nfunc",
    "quadratic_root",
    "solve_method1",
    "solve_method2",
    "solve_method3",
    "step_method1",
    "step_method2",
    "step_method3",
    "__version__",
]
