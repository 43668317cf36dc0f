"""pdefix: fixed-point solver for semilinear PDE systems on periodic grids.

The pipeline: parse a problem file into equations, split each equation into
linear part, nonlinear part, and forcing, invert the linear part per Fourier
mode, and iterate the resulting fixed-point map until it contracts to a
solution, which is then re-checked against the differential form.
"""

from .builtins import BUILTIN_NAMES, BuiltinProblem, builtin_problem
from .errors import (
    ComponentOutOfRange,
    ConstraintArityMismatch,
    DimensionMismatch,
    DivergenceDetected,
    IllConditioned,
    InsufficientData,
    MaxIterExceeded,
    MissingSection,
    OracleNonConvergence,
    PdefixError,
    ShapeMismatch,
    SlabNonConvergence,
    SpecSyntaxError,
    TooManyUnknowns,
    UnknownProblem,
    UnsupportedTerm,
    ZeroModeSingular,
)
from .expressions import (
    ComponentRef,
    Constant,
    CoordFunc,
    DerivFactor,
    Expr,
    ForcingRef,
    Product,
    Sum,
    evaluate_expr,
    to_text,
)
from .fields import (
    MultiIndex,
    NormKind,
    SpectralField,
    WaveVector,
    fourier_symbol,
    norm,
)
from .fieldio import read_field_csv, write_field_csv, write_pgm, write_report_csv
from .fixedpoint import (
    ConvergenceTrace,
    IterationRecord,
    SolverOptions,
    estimate_contraction,
    modified_forcing,
    picard_solve,
)
from .parsing import format_problem, parse_expression, parse_problem
from .problem import Constraint, Kind, ProblemSpec
from .spectral import (
    ConstraintProjector,
    SymbolMatrix,
    apply_linear,
    assemble_symbol,
    duhamel_step,
    invert_stationary,
    project,
    propagate,
    spectral_divergence,
)
from .splitting import LinearOperator, LinearTerm, SplitSystem, split_terms
from .verification import (
    FieldComparison,
    ResidualReport,
    compare_fields,
    differential_residual,
    oracle_newton,
    residual_field,
)

__version__ = "0.1.0"
