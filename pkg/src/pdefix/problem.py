"""Problem description: the parsed system plus grid and solve metadata."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import ConstraintArityMismatch, MissingSection
from .expressions import EvalContext, Expr, evaluate, scale
from .fields import MAX_GRID, MIN_GRID, SpectralField


class Kind(Enum):
    STATIONARY = "stationary"
    EVOLUTION = "evolution"


class Constraint(Enum):
    NONE = "none"
    LERAY = "leray"


@dataclass(frozen=True)
class ProblemSpec:
    """A full semilinear system: equations, forcing, grid, and solve kind.

    ``equations[k]`` holds the left-hand side of equation k; the right-hand
    side is always the forcing reference f[k], whose values come from
    ``forcing_exprs[k]``.
    """

    kind: Kind
    dim: int
    n_components: int
    domain: tuple[float, ...]
    grid: tuple[int, ...]
    constraint: Constraint
    equations: tuple[Expr, ...]
    forcing_exprs: tuple[Expr, ...]
    initial_exprs: tuple[Expr, ...] | None = None
    t_final: float | None = None
    dt: float | None = None

    def __post_init__(self):
        if not 1 <= self.dim <= 3:
            raise ValueError(f"dim must be 1, 2, or 3, got {self.dim}")
        if not 1 <= self.n_components <= 4:
            raise ValueError(f"components must be 1..4, got {self.n_components}")
        if len(self.domain) != self.dim or len(self.grid) != self.dim:
            raise ValueError("domain and grid must have one entry per axis")
        if any(L <= 0 for L in self.domain):
            raise ValueError("axis lengths must be positive")
        for g in self.grid:
            if g < MIN_GRID or g > MAX_GRID or (g & (g - 1)) != 0:
                raise ValueError(
                    f"grid sizes must be powers of two in [{MIN_GRID}, {MAX_GRID}], got {g}"
                )
        if len(self.equations) != self.n_components:
            raise MissingSection(f"equation[{len(self.equations)}]")
        if len(self.forcing_exprs) != self.n_components:
            raise MissingSection(f"forcing[{len(self.forcing_exprs)}]")
        if self.constraint is Constraint.LERAY and self.n_components != self.dim:
            raise ConstraintArityMismatch(
                f"leray constraint needs components == dim, got "
                f"{self.n_components} components in {self.dim}D"
            )
        if self.kind is Kind.EVOLUTION:
            if self.initial_exprs is None:
                raise MissingSection("initial[0]")
            if len(self.initial_exprs) != self.n_components:
                raise MissingSection(f"initial[{len(self.initial_exprs)}]")
            if self.t_final is None:
                raise MissingSection("t_final")
            if self.dt is None:
                raise MissingSection("dt")
            if self.t_final <= 0 or self.dt <= 0:
                raise ValueError("t_final and dt must be positive")

    @cached_property
    def split(self):
        from .splitting import split_terms

        return split_terms(self.equations, self.dim, self.n_components)

    def _eval_componentwise(self, exprs, forcing=None) -> SpectralField:
        probe = SpectralField.zeros(self.n_components, self.grid, self.domain)
        ctx = EvalContext(probe, forcing)
        values = np.stack([evaluate(e, ctx) for e in exprs])
        return SpectralField.from_physical(values, self.domain)

    @cached_property
    def base_forcing_field(self) -> SpectralField:
        """The f[k] values declared in the forcing sections."""
        return self._eval_componentwise(self.forcing_exprs)

    @cached_property
    def forcing_field(self) -> SpectralField:
        """Effective right-hand side: f[k] minus field-free left-hand terms."""
        return self._eval_componentwise(self.split.forcing, self.base_forcing_field)

    def initial_field(self) -> SpectralField:
        if self.initial_exprs is None:
            raise MissingSection("initial[0]")
        return self._eval_componentwise(self.initial_exprs)

    def with_grid(self, grid: tuple[int, ...]) -> "ProblemSpec":
        return replace(self, grid=tuple(grid))

    def with_forcing_scale(self, factor: float) -> "ProblemSpec":
        scaled = tuple(scale(e, float(factor)) for e in self.forcing_exprs)
        return replace(self, forcing_exprs=scaled)
