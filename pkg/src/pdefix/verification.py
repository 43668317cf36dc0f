"""Certify solutions against the differential form of the system.

Two independent checks live here.  ``differential_residual`` evaluates the
original equations pointwise (spectral derivatives, dealiased products) and
reports residual norms.  ``oracle_newton`` solves small stationary problems
by dense Newton on the physical-space collocation system, with derivative and
dealiasing matrices built densely from the discrete Fourier transform; it
never touches the FFT-based solve path and serves as ground truth for it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OracleNonConvergence, ShapeMismatch, TooManyUnknowns
from .expressions import (
    Constant,
    ComponentRef,
    CoordFunc,
    DerivFactor,
    EvalContext,
    Expr,
    ForcingRef,
    Product,
    Sum,
    evaluate,
)
from .fields import NormKind, SpectralField, cell_volume, norm
from .problem import Kind, ProblemSpec
from .spectral import apply_linear, assemble_symbol

NEWTON_FD_STEP = 1e-7
NEWTON_RESIDUAL_TOL = 1e-11
NEWTON_MAX_STEPS = 100
ORACLE_UNKNOWN_CAP = 64


@dataclass(frozen=True)
class ResidualReport:
    """Residual norms of F_l(u) + F_n(u) - f, per equation and overall."""

    linf: tuple[float, ...]
    l2: tuple[float, ...]
    overall: float
    grid: tuple[int, ...]
    tolerance: float | None = None

    @property
    def n_equations(self) -> int:
        return len(self.linf)


def residual_field(spec: ProblemSpec, u: SpectralField) -> SpectralField:
    """F_l(u) + F_n(u) - f as a field, evaluated pseudospectrally."""
    if spec.kind is not Kind.STATIONARY:
        raise ValueError("differential residual is defined for stationary problems")
    split = spec.split
    sym = assemble_symbol(split.linear, spec.dim, spec.domain, spec.grid)
    out = apply_linear(sym, u).physical.copy()
    ctx = EvalContext(u, spec.base_forcing_field)
    for k, term in enumerate(split.nonlinear):
        if term is not None:
            out[k] += evaluate(term, ctx)
    out -= spec.forcing_field.physical
    return SpectralField.from_physical(out, spec.domain)


def differential_residual(
    spec: ProblemSpec, u: SpectralField, tolerance: float | None = None
) -> ResidualReport:
    res = residual_field(spec, u)
    weight = np.sqrt(cell_volume(spec.grid, spec.domain))
    linf = tuple(float(np.abs(c).max()) for c in res.physical)
    l2 = tuple(float(weight * np.sqrt(np.sum(c * c))) for c in res.physical)
    return ResidualReport(linf, l2, max(linf), spec.grid, tolerance)


# --- field comparison --------------------------------------------------------


@dataclass(frozen=True)
class FieldComparison:
    linf: float
    l2_relative: float


def compare_fields(a: SpectralField, b: SpectralField) -> FieldComparison:
    """Linf difference and relative L2 difference |a-b|/(1+|b|)."""
    if (
        a.grid != b.grid
        or a.n_components != b.n_components
        or a.domain != b.domain
    ):
        raise ShapeMismatch(
            f"fields differ in shape: {a.n_components}x{a.grid} on {a.domain} vs "
            f"{b.n_components}x{b.grid} on {b.domain}"
        )
    diff = a - b
    linf = norm(diff, NormKind.LINF)
    l2 = norm(diff, NormKind.L2) / (1.0 + norm(b, NormKind.L2))
    return FieldComparison(linf, l2)


# --- dense collocation oracle -------------------------------------------------


class _DenseWorkspace:
    """Dense DFT-derived operators for one grid, built without any FFT."""

    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        self.grid = spec.grid
        self.domain = spec.domain
        self._deriv_cache: dict[tuple[int, int], np.ndarray] = {}
        self._dealias_cache: dict[int, np.ndarray] = {}

    @staticmethod
    def _dft_pair(g: int) -> tuple[np.ndarray, np.ndarray]:
        j = np.arange(g)
        phase = np.exp(-2j * np.pi * np.outer(j, j) / g)
        return phase / g, phase.conj().T * 1.0  # forward (divides by g), inverse

    def deriv_matrix(self, axis: int, order: int) -> np.ndarray:
        key = (axis, order)
        if key not in self._deriv_cache:
            g = self.grid[axis]
            fwd, inv = self._dft_pair(g)
            modes = np.rint(np.fft.fftfreq(g) * g)
            kap = 2.0 * np.pi * modes / self.domain[axis]
            symbol = (1j * kap) ** order
            self._deriv_cache[key] = np.real(inv @ (symbol[:, np.newaxis] * fwd))
        return self._deriv_cache[key]

    def dealias_matrix(self, axis: int) -> np.ndarray:
        if axis not in self._dealias_cache:
            g = self.grid[axis]
            fwd, inv = self._dft_pair(g)
            modes = np.rint(np.fft.fftfreq(g) * g)
            keep = (np.abs(modes) <= g // 3).astype(float)
            self._dealias_cache[axis] = np.real(inv @ (keep[:, np.newaxis] * fwd))
        return self._dealias_cache[axis]

    def _apply_axis(self, mat: np.ndarray, values: np.ndarray, axis: int) -> np.ndarray:
        moved = np.moveaxis(values, axis, 0)
        return np.moveaxis(np.tensordot(mat, moved, axes=(1, 0)), 0, axis)

    def derivative(self, values: np.ndarray, alpha) -> np.ndarray:
        out = values
        for axis, order in enumerate(alpha.exponents):
            if order:
                out = self._apply_axis(self.deriv_matrix(axis, order), out, axis)
        return out

    def truncate(self, values: np.ndarray) -> np.ndarray:
        out = values
        for axis in range(len(self.grid)):
            out = self._apply_axis(self.dealias_matrix(axis), out, axis)
        return out

    def coordinates(self, axis: int) -> np.ndarray:
        g, L = self.grid[axis], self.domain[axis]
        shape = [1] * len(self.grid)
        shape[axis] = g
        return (np.arange(g) * (L / g)).reshape(shape)

    def evaluate(self, expr: Expr, u: np.ndarray, forcing: np.ndarray) -> np.ndarray:
        """Dense twin of expressions.evaluate (same discretization semantics)."""
        if isinstance(expr, Constant):
            return np.full(self.grid, expr.value)
        if isinstance(expr, ComponentRef):
            return u[expr.index]
        if isinstance(expr, ForcingRef):
            return forcing[expr.index]
        if isinstance(expr, DerivFactor):
            return self.derivative(u[expr.index], expr.alpha)
        if isinstance(expr, CoordFunc):
            phase = expr.frequency * self.coordinates(expr.axis)
            values = np.sin(phase) if expr.func == "sin" else np.cos(phase)
            return np.broadcast_to(values, self.grid).copy()
        if isinstance(expr, Sum):
            acc = self.evaluate(expr.children[0], u, forcing)
            for child in expr.children[1:]:
                acc = acc + self.evaluate(child, u, forcing)
            return acc
        if isinstance(expr, Product):
            scalar = 1.0
            arrays = []
            for child in expr.children:
                if isinstance(child, Constant):
                    scalar *= child.value
                else:
                    arrays.append(self.evaluate(child, u, forcing))
            if not arrays:
                return np.full(self.grid, scalar)
            acc = arrays[0]
            for nxt in arrays[1:]:
                acc = self.truncate(acc * nxt)
            return scalar * acc
        raise TypeError(f"not an expression node: {expr!r}")

    def residual(self, flat: np.ndarray) -> np.ndarray:
        spec = self.spec
        u = flat.reshape(spec.n_components, *self.grid)
        base = np.stack(
            [self.evaluate(e, u, None) for e in spec.forcing_exprs]
        )
        out = np.empty_like(u)
        split = spec.split
        for k in range(spec.n_components):
            acc = np.zeros(self.grid)
            for term in split.linear.equation_terms(k):
                acc += term.coefficient * self.derivative(u[term.component], term.alpha)
            if split.nonlinear[k] is not None:
                acc += self.evaluate(split.nonlinear[k], u, base)
            acc -= self.evaluate(split.forcing[k], u, base)
            out[k] = acc
        return out.reshape(-1)


def oracle_newton(spec: ProblemSpec, max_unknowns: int = ORACLE_UNKNOWN_CAP) -> SpectralField:
    """Dense Newton with forward-difference Jacobian on the collocation system.

    Independent of the spectral solve path: every linear operator is a dense
    matrix.  Practical only for tiny grids; guarded by ``max_unknowns``.
    """
    if spec.kind is not Kind.STATIONARY:
        raise ValueError("the dense oracle handles stationary problems only")
    unknowns = spec.n_components * int(np.prod(spec.grid))
    if unknowns > max_unknowns:
        raise TooManyUnknowns(unknowns, max_unknowns)

    ws = _DenseWorkspace(spec)
    x = np.zeros(unknowns)
    res = ws.residual(x)
    best = np.abs(res).max()
    for step in range(NEWTON_MAX_STEPS):
        if best <= NEWTON_RESIDUAL_TOL:
            return SpectralField.from_physical(
                x.reshape(spec.n_components, *spec.grid), spec.domain
            )
        jac = np.empty((unknowns, unknowns))
        for j in range(unknowns):
            bumped = x.copy()
            bumped[j] += NEWTON_FD_STEP
            jac[:, j] = (ws.residual(bumped) - res) / NEWTON_FD_STEP
        delta = np.linalg.solve(jac, -res)
        lam = 1.0
        while True:
            trial = x + lam * delta
            trial_res = ws.residual(trial)
            trial_norm = np.abs(trial_res).max()
            if trial_norm < best or lam < 1e-8:
                break
            lam *= 0.5
        if trial_norm >= best and best > NEWTON_RESIDUAL_TOL:
            raise OracleNonConvergence(step + 1, float(best))
        x, res, best = trial, trial_res, trial_norm
    if best <= NEWTON_RESIDUAL_TOL:
        return SpectralField.from_physical(
            x.reshape(spec.n_components, *spec.grid), spec.domain
        )
    raise OracleNonConvergence(NEWTON_MAX_STEPS, float(best))
