"""Exception hierarchy for the pdefix solver."""

from __future__ import annotations


class PdefixError(Exception):
    """Base class for all errors raised by pdefix."""


# --- parsing / problem definition ---------------------------------------


class SpecSyntaxError(PdefixError):
    """Problem text violates the file grammar."""

    def __init__(self, line: int, column: int, expected: str):
        self.line = line
        self.column = column
        self.expected = expected
        super().__init__(f"line {line}, column {column}: expected {expected}")


class ComponentOutOfRange(PdefixError):
    def __init__(self, index: int, n_components: int):
        self.index = index
        self.n_components = n_components
        super().__init__(
            f"component index {index} out of range for {n_components} component(s)"
        )


class DimensionMismatch(PdefixError):
    """Multi-index / wavevector / axis arity does not match the spatial dimension."""


class MissingSection(PdefixError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing required section '{name}'")


class UnsupportedTerm(PdefixError):
    """Equation term outside the supported class (e.g. x-dependent coefficient on u)."""


class UnknownProblem(PdefixError):
    def __init__(self, name: str, known: tuple[str, ...]):
        self.name = name
        super().__init__(f"unknown builtin problem '{name}'; known: {', '.join(known)}")


# --- linear inversion / time stepping ------------------------------------


class ZeroModeSingular(PdefixError):
    def __init__(self, mode: tuple[int, ...], rhs_magnitude: float):
        self.mode = mode
        self.rhs_magnitude = rhs_magnitude
        super().__init__(
            f"linear symbol is singular at mode {mode} but the right-hand side "
            f"carries magnitude {rhs_magnitude:.3e} there"
        )


class IllConditioned(PdefixError):
    def __init__(self, mode: tuple[int, ...], condition: float):
        self.mode = mode
        self.condition = condition
        super().__init__(
            f"linear symbol at mode {mode} has condition estimate {condition:.3e}"
        )


class SlabNonConvergence(PdefixError):
    def __init__(self, iterations: int, last_update: float):
        self.iterations = iterations
        self.last_update = last_update
        super().__init__(
            f"time-slab iteration did not contract after {iterations} sweeps "
            f"(last update {last_update:.3e}); reduce dt"
        )


class ConstraintArityMismatch(PdefixError):
    """Constraint requires as many components as spatial dimensions."""


# --- fixed-point engine ----------------------------------------------------


class DivergenceDetected(PdefixError):
    def __init__(self, iteration: int, detail: str):
        self.iteration = iteration
        super().__init__(f"iteration {iteration}: {detail}")


class MaxIterExceeded(PdefixError):
    def __init__(self, iterations: int, last_update: float):
        self.iterations = iterations
        self.last_update = last_update
        super().__init__(
            f"no convergence within {iterations} iterations (last update {last_update:.3e})"
        )


class InsufficientData(PdefixError):
    """Not enough recorded iterations for the requested diagnostic."""


# --- verification -----------------------------------------------------------


class OracleNonConvergence(PdefixError):
    def __init__(self, steps: int, residual: float):
        self.steps = steps
        self.residual = residual
        super().__init__(
            f"dense Newton oracle stalled after {steps} steps (residual {residual:.3e})"
        )


class TooManyUnknowns(PdefixError):
    def __init__(self, unknowns: int, cap: int):
        self.unknowns = unknowns
        self.cap = cap
        super().__init__(f"{unknowns} unknowns exceed the dense-oracle cap of {cap}")


class ShapeMismatch(PdefixError):
    """Fields do not share dimension, component count, grid, and domain."""


# Errors that mean "the solve failed", as opposed to bad input.  The CLI maps
# these to exit code 2 and everything else parse-like to exit code 1.
SOLVER_ERRORS = (
    ZeroModeSingular,
    IllConditioned,
    SlabNonConvergence,
    DivergenceDetected,
    MaxIterExceeded,
    OracleNonConvergence,
)
