"""Expression trees for equation right/left-hand sides.

Nodes form a small closed language: sums and products of constants, field
components, mixed derivatives of components, forcing references, and sin/cos
coordinate functions.  Trees print back to the problem-file grammar and
re-parse to structurally identical trees.

Evaluation is pseudospectral: derivatives are applied per mode, products are
formed pointwise in physical space, and every product of two field factors is
followed by a 2/3-rule truncation so low-order polynomial nonlinearities of
band-limited fields stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .fields import (
    MultiIndex,
    SpectralField,
    axis_coordinates,
    dealias_mask,
    symbol_values,
)


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Constant(Expr):
    value: float


@dataclass(frozen=True)
class ComponentRef(Expr):
    index: int


@dataclass(frozen=True)
class ForcingRef(Expr):
    index: int


@dataclass(frozen=True)
class DerivFactor(Expr):
    alpha: MultiIndex
    index: int


@dataclass(frozen=True)
class CoordFunc(Expr):
    func: str  # "sin" | "cos"
    axis: int  # 0-based
    frequency: int


@dataclass(frozen=True)
class Sum(Expr):
    children: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Sum needs at least two children")


@dataclass(frozen=True)
class Product(Expr):
    children: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Product needs at least two children")


def sum_of(terms: list[Expr]) -> Expr | None:
    if not terms:
        return None
    if len(terms) == 1:
        return terms[0]
    return Sum(tuple(terms))


def product_of(factors: list[Expr]) -> Expr:
    if not factors:
        return Constant(1.0)
    if len(factors) == 1:
        return factors[0]
    return Product(tuple(factors))


def negate(expr: Expr) -> Expr:
    """Fold a sign flip into the leading constant, keeping products flat."""
    if isinstance(expr, Constant):
        return Constant(-expr.value)
    if isinstance(expr, Product):
        head = expr.children[0]
        if isinstance(head, Constant):
            return Product((Constant(-head.value),) + expr.children[1:])
        return Product((Constant(-1.0),) + expr.children)
    return Product((Constant(-1.0), expr))


def scale(expr: Expr, factor: float) -> Expr:
    """Multiply an expression by a constant, keeping products flat."""
    if factor == 1.0:
        return expr
    if isinstance(expr, Constant):
        return Constant(factor * expr.value)
    if isinstance(expr, Product):
        head = expr.children[0]
        if isinstance(head, Constant):
            return Product((Constant(factor * head.value),) + expr.children[1:])
        return Product((Constant(factor),) + expr.children)
    return Product((Constant(factor), expr))


def additive_terms(expr: Expr) -> tuple[Expr, ...]:
    return expr.children if isinstance(expr, Sum) else (expr,)


def factors_of(expr: Expr) -> tuple[Expr, ...]:
    return expr.children if isinstance(expr, Product) else (expr,)


def depends_on_field(expr: Expr) -> bool:
    if isinstance(expr, (ComponentRef, DerivFactor)):
        return True
    if isinstance(expr, (Sum, Product)):
        return any(depends_on_field(c) for c in expr.children)
    return False


def contains_coord_func(expr: Expr) -> bool:
    if isinstance(expr, CoordFunc):
        return True
    if isinstance(expr, (Sum, Product)):
        return any(contains_coord_func(c) for c in expr.children)
    return False


# --- printing ---------------------------------------------------------------


def _split_sign(term: Expr) -> tuple[bool, Expr]:
    """Return (is_negative, magnitude) so sums can print with '-' separators."""
    if isinstance(term, Constant) and term.value < 0:
        return True, Constant(-term.value)
    if isinstance(term, Product):
        head = term.children[0]
        if isinstance(head, Constant) and head.value < 0:
            rest = term.children[1:]
            if head.value == -1.0 and len(rest) >= 1:
                return True, rest[0] if len(rest) == 1 else Product(rest)
            return True, Product((Constant(-head.value),) + rest)
    return False, term


def _format_number(v: float) -> str:
    return repr(float(v))


def _term_text(term: Expr) -> str:
    """Print a summand, folding a negative leading constant into a unary '-'."""
    negative, magnitude = _split_sign(term)
    text = _node_text(magnitude)
    if negative and isinstance(magnitude, Sum):
        text = f"({text})"
    return ("-" if negative else "") + text


def _node_text(expr: Expr) -> str:
    if isinstance(expr, Constant):
        v = expr.value
        return f"-{_format_number(-v)}" if v < 0 else _format_number(v)
    if isinstance(expr, ComponentRef):
        return f"u[{expr.index}]"
    if isinstance(expr, ForcingRef):
        return f"f[{expr.index}]"
    if isinstance(expr, DerivFactor):
        orders = ",".join(str(a) for a in expr.alpha.exponents)
        return f"D({orders})u[{expr.index}]"
    if isinstance(expr, CoordFunc):
        return f"{expr.func}({expr.frequency}*x{expr.axis + 1})"
    if isinstance(expr, Product):
        parts = []
        for child in expr.children:
            text = _node_text(child)
            # parenthesize factors that would not re-parse as a bare factor
            if isinstance(child, Sum) or (isinstance(child, Constant) and child.value < 0):
                text = f"({text})"
            parts.append(text)
        return "*".join(parts)
    if isinstance(expr, Sum):
        out = _term_text(expr.children[0])
        for child in expr.children[1:]:
            negative, magnitude = _split_sign(child)
            text = _node_text(magnitude)
            if isinstance(magnitude, Sum):
                text = f"({text})"
            out += (" - " if negative else " + ") + text
        return out
    raise TypeError(f"not an expression node: {expr!r}")


def to_text(expr: Expr) -> str:
    return _term_text(expr) if not isinstance(expr, Sum) else _node_text(expr)


# --- evaluation -------------------------------------------------------------


class EvalContext:
    """Grid-bound workspace shared by expression evaluations."""

    def __init__(self, u: SpectralField, forcing: SpectralField | None = None):
        self.u = u
        self.forcing = forcing
        self.grid = u.grid
        self.domain = u.domain
        self.coords = axis_coordinates(self.grid, self.domain)
        self.mask = dealias_mask(self.grid)

    def truncate(self, values: np.ndarray) -> np.ndarray:
        """2/3-rule low-pass of a physical array."""
        return np.fft.ifftn(self.mask * np.fft.fftn(values, norm="forward"), norm="forward").real

    def derivative(self, alpha: MultiIndex, index: int) -> np.ndarray:
        coeffs = symbol_values(alpha, self.grid, self.domain) * self.u.spectral[index]
        return np.fft.ifftn(coeffs, norm="forward").real


def evaluate(expr: Expr, ctx: EvalContext) -> np.ndarray:
    """Evaluate a node to a physical-space array of the grid shape."""
    if isinstance(expr, Constant):
        return np.full(ctx.grid, expr.value)
    if isinstance(expr, ComponentRef):
        return ctx.u.physical[expr.index]
    if isinstance(expr, ForcingRef):
        if ctx.forcing is None:
            raise ValueError("expression references forcing but none was supplied")
        return ctx.forcing.physical[expr.index]
    if isinstance(expr, DerivFactor):
        if len(expr.alpha) != len(ctx.grid):
            raise DimensionMismatch(
                f"derivative arity {len(expr.alpha)} on a {len(ctx.grid)}-dimensional grid"
            )
        return ctx.derivative(expr.alpha, expr.index)
    if isinstance(expr, CoordFunc):
        phase = expr.frequency * ctx.coords[expr.axis]
        values = np.sin(phase) if expr.func == "sin" else np.cos(phase)
        return np.broadcast_to(values, ctx.grid).copy() if values.shape != ctx.grid else values
    if isinstance(expr, Sum):
        acc = evaluate(expr.children[0], ctx)
        for child in expr.children[1:]:
            acc = acc + evaluate(child, ctx)
        return acc
    if isinstance(expr, Product):
        # Constants are exact scalar multipliers; only field*field products
        # alias and need the 2/3 truncation.
        scalar = 1.0
        arrays: list[np.ndarray] = []
        for child in expr.children:
            if isinstance(child, Constant):
                scalar *= child.value
            else:
                arrays.append(evaluate(child, ctx))
        if not arrays:
            return np.full(ctx.grid, scalar)
        acc = arrays[0]
        for nxt in arrays[1:]:
            acc = ctx.truncate(acc * nxt)
        return scalar * acc
    raise TypeError(f"not an expression node: {expr!r}")


def evaluate_expr(
    expr: Expr, u: SpectralField, forcing: SpectralField | None = None
) -> SpectralField:
    """Evaluate a node against a field, returning a one-component field."""
    values = evaluate(expr, EvalContext(u, forcing))
    return SpectralField.from_physical(values[np.newaxis], u.domain)
