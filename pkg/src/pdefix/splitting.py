"""Split each equation into linear part, nonlinear part, and forcing.

A top-level additive term is linear when it is a product of constants with
exactly one component reference or derivative factor.  Every other term that
depends on the unknown field is nonlinear.  Terms free of the unknown migrate
to the forcing side with flipped sign (the stored right-hand side is always
the forcing reference itself).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnsupportedTerm
from .expressions import (
    ComponentRef,
    Constant,
    DerivFactor,
    Expr,
    ForcingRef,
    additive_terms,
    contains_coord_func,
    depends_on_field,
    factors_of,
    negate,
    sum_of,
    to_text,
)
from .fields import MultiIndex


@dataclass(frozen=True)
class LinearTerm:
    equation: int
    component: int
    coefficient: float
    alpha: MultiIndex


@dataclass(frozen=True)
class LinearOperator:
    """Constant-coefficient linear part, one term list per equation."""

    n_components: int
    dim: int
    terms: tuple[tuple[LinearTerm, ...], ...]

    def equation_terms(self, k: int) -> tuple[LinearTerm, ...]:
        return self.terms[k]

    @property
    def all_terms(self) -> tuple[LinearTerm, ...]:
        return tuple(t for eq in self.terms for t in eq)

    @property
    def order(self) -> int:
        return max((t.alpha.order for t in self.all_terms), default=0)


@dataclass(frozen=True)
class SplitSystem:
    linear: LinearOperator
    nonlinear: tuple[Expr | None, ...]
    forcing: tuple[Expr, ...]


def _classify_term(term: Expr, equation: int, dim: int) -> LinearTerm | None:
    """Return a LinearTerm for Constant* x (ComponentRef | DerivFactor) shapes.

    Returns None for genuinely nonlinear terms.  Raises UnsupportedTerm when a
    single field factor carries a coordinate-function coefficient: that is a
    variable-coefficient linear term, which the constant-coefficient symbol
    inversion cannot represent.
    """
    coefficient = 1.0
    field_factor = None
    degree = 0
    has_coord = False
    plain = True  # no nested sums or other shapes among the factors
    for factor in factors_of(term):
        if isinstance(factor, Constant):
            coefficient *= factor.value
        elif isinstance(factor, (ComponentRef, DerivFactor)):
            degree += 1
            field_factor = factor
        else:
            plain = False
            has_coord = has_coord or contains_coord_func(factor)
    if degree == 1 and plain:
        if isinstance(field_factor, ComponentRef):
            return LinearTerm(equation, field_factor.index, coefficient, MultiIndex.zero(dim))
        return LinearTerm(equation, field_factor.index, coefficient, field_factor.alpha)
    if degree == 1 and has_coord:
        raise UnsupportedTerm(
            f"equation[{equation}]: term '{to_text(term)}' multiplies the unknown "
            "by a coordinate function; variable linear coefficients are not supported"
        )
    return None


def split_terms(equations: tuple[Expr, ...], dim: int, n_components: int) -> SplitSystem:
    """Classify every additive term of every equation left-hand side."""
    linear_rows: list[tuple[LinearTerm, ...]] = []
    nonlinear_parts: list[Expr | None] = []
    forcing_parts: list[Expr] = []

    for k, equation in enumerate(equations):
        accumulated: dict[tuple[int, tuple[int, ...]], float] = {}
        nonlinear_terms: list[Expr] = []
        migrated: list[Expr] = []

        for term in additive_terms(equation):
            if not depends_on_field(term):
                migrated.append(negate(term))
                continue
            matched = _classify_term(term, k, dim)
            if matched is not None:
                key = (matched.component, matched.alpha.exponents)
                accumulated[key] = accumulated.get(key, 0.0) + matched.coefficient
            else:
                nonlinear_terms.append(term)

        row = tuple(
            LinearTerm(k, component, coefficient, MultiIndex(exponents))
            for (component, exponents), coefficient in accumulated.items()
            if coefficient != 0.0
        )
        linear_rows.append(row)
        nonlinear_parts.append(sum_of(nonlinear_terms))
        forcing_parts.append(sum_of([ForcingRef(k)] + migrated))

    return SplitSystem(
        linear=LinearOperator(n_components, dim, tuple(linear_rows)),
        nonlinear=tuple(nonlinear_parts),
        forcing=tuple(forcing_parts),
    )
