"""prootkit: principal matrix p-th roots by Newton-type iterations.

Dense real linear algebra with an operation-counting layer, five
equivalent root iterations (including a geometric-polynomial form whose
per-step cost is logarithmic in p), spectrum preconditioning, an exact
analytic cost model, and a benchmark CLI.
"""

from ._backend import available_backends, backend_name, use_backend
from .costmodel import CostEntry, cost_curve, cost_entry, validate_counts
from .errors import (
    ConvergenceError,
    CountMismatchError,
    MMParseError,
    SingularMatrixError,
)
from .iterations import (
    IterationState,
    MethodTag,
    StoppingRule,
    initial_state,
    residual,
    run,
    step,
    step_coupled,
    step_in,
    step_iter39,
    step_plain,
    step_variant,
)
from .linalg import (
    OpCounter,
    axpy_affine,
    frob_norm,
    lu_solve_right,
    matmul,
    power_naive,
)
from .mmio import read_matrix_market, write_matrix_market
from .polyplan import EvalPlan, build_plan, eval_plan, format_factored, plan_cost_table
from .precondition import (
    PreconditionedProblem,
    precondition,
    recover_root,
    sqrt_newton,
)
from .report import ConvergenceReport, ReportRow, read_report_csv, write_report_csv
from .sources import MatrixSource, gen_random_spd, load_source, parse_source

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "ConvergenceReport",
    "CostEntry",
    "CountMismatchError",
    "EvalPlan",
    "IterationState",
    "MMParseError",
    "MatrixSource",
    "MethodTag",
    "OpCounter",
    "PreconditionedProblem",
    "ReportRow",
    "SingularMatrixError",
    "StoppingRule",
    "available_backends",
    "axpy_affine",
    "backend_name",
    "build_plan",
    "cost_curve",
    "cost_entry",
    "eval_plan",
    "format_factored",
    "frob_norm",
    "gen_random_spd",
    "initial_state",
    "load_source",
    "lu_solve_right",
    "matmul",
    "parse_source",
    "plan_cost_table",
    "power_naive",
    "precondition",
    "read_matrix_market",
    "read_report_csv",
    "recover_root",
    "residual",
    "run",
    "sqrt_newton",
    "step",
    "step_coupled",
    "step_in",
    "step_iter39",
    "step_plain",
    "step_variant",
    "use_backend",
    "validate_counts",
    "write_matrix_market",
    "write_report_csv",
]
