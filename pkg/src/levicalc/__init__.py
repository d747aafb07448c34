"""Computable infinitesimal calculus on a truncated Levi-Civita field.

The package provides, in order of dependency:

* ``field``     -- non-Archimedean ordered-field arithmetic (LCNumber),
* ``expr``      -- term ASTs for smooth functions and their field extension,
* ``calculus``  -- derivatives, mean-value theta solvers, partition-based
                   extremum search, Riemann-sum integration, Taylor
                   remainder checks,
* ``formulas``  -- a first-order formula DSL with a randomized transfer
                   checker,
* ``cli``       -- the ``levicalc`` command-line front end.
"""

from .calculus import (
    DEFAULT_H_SCHEDULE,
    IntegralResult,
    PartitionResult,
    ThetaResult,
    derivative,
    evt_max,
    mvt_theta_infinitesimal,
    mvt_theta_real,
    riemann_integral,
    taylor_remainder_check,
    taylor_remainder_check_infinitesimal,
)
from .errors import (
    BindingError,
    DivisionByZero,
    DomainError,
    EvaluationError,
    LevicalcError,
    NegativeLeading,
    NoBracket,
    NotFinite,
    OrderTooHigh,
    ParseError,
)
from .expr import (
    eval_hyper,
    eval_real,
    free_variables,
    parse_expr,
    render_expr,
    symbolic_derivative,
)
from .field import (
    DEFAULT_CONFIG,
    EQUAL,
    GREATER,
    LESS,
    Classification,
    FieldConfig,
    LCNumber,
    add,
    classify,
    coefficient_norm,
    compare,
    eps,
    format_lc,
    from_json,
    infinite,
    inv,
    is_infinitely_close,
    mul,
    nth_root,
    one,
    parse_lc,
    sqrt,
    standard_part,
    sub,
    to_json,
    zero,
)
from .formulas import (
    CheckReport,
    Formula,
    SamplerConfig,
    check,
    evaluate_matrix,
    parse_formula,
    parse_formula_file,
    render_formula,
    sample,
    stratum_contains,
)

__version__ = "0.1.0"
