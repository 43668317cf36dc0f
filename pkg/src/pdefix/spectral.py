"""Spectral image of the linear part and its inversion.

The constant-coefficient linear operator becomes an n x n complex matrix per
wavevector.  Stationary problems are solved by a per-mode matrix solve;
evolution problems use the per-mode matrix exponential as propagator and an
exponential-trapezoid quadrature for one slab of the mild-solution integral,
closed by an inner fixed-point sweep.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import backends
from .errors import (
    ConstraintArityMismatch,
    IllConditioned,
    SlabNonConvergence,
    ZeroModeSingular,
)
from .fields import NormKind, SpectralField, kappa_arrays, mode_arrays, norm, symbol_values
from .problem import Constraint, ProblemSpec
from .splitting import LinearOperator

SINGULAR_RTOL = 1e-12
RHS_TOL = 1e-12
CONDITION_LIMIT = 1e12
SLAB_TOL = 1e-12
SLAB_MAX_INNER = 50


@dataclass(frozen=True)
class SymbolMatrix:
    """Per-mode matrices of the linear part, flattened over the grid.

    ``values[m, k, j]`` multiplies component j's coefficient at flat mode m in
    equation k.
    """

    grid: tuple[int, ...]
    domain: tuple[float, ...]
    n_components: int
    values: np.ndarray  # (n_modes, n, n) complex128

    @property
    def n_modes(self) -> int:
        return self.values.shape[0]

    def mode_tuple(self, flat_index: int) -> tuple[int, ...]:
        per_axis = mode_arrays(self.grid)
        multi = np.unravel_index(flat_index, self.grid)
        return tuple(int(per_axis[ax][i]) for ax, i in enumerate(multi))


def _to_mode_vectors(field: SpectralField) -> np.ndarray:
    """(components, *grid) spectral -> (modes, components)."""
    n = field.n_components
    return np.ascontiguousarray(field.spectral.reshape(n, -1).T)


def _from_mode_vectors(vecs: np.ndarray, grid, domain) -> SpectralField:
    n = vecs.shape[1]
    return SpectralField.from_spectral(vecs.T.reshape(n, *grid), domain)


def assemble_symbol(
    linop: LinearOperator, dim: int, domain, grid
) -> SymbolMatrix:
    """Evaluate the linear part's derivative symbols on the whole mode mesh."""
    grid = tuple(grid)
    domain = tuple(domain)
    n = linop.n_components
    n_modes = int(np.prod(grid))
    values = np.zeros((n_modes, n, n), dtype=np.complex128)
    for term in linop.all_terms:
        sym = symbol_values(term.alpha, grid, domain).reshape(-1)
        values[:, term.equation, term.component] += term.coefficient * sym
    return SymbolMatrix(grid, domain, n, values)


def apply_linear(sym: SymbolMatrix, field: SpectralField) -> SpectralField:
    """Apply the linear operator per mode (used by residual checks)."""
    vecs = _to_mode_vectors(field)
    out = backends.active().matvec_modes(sym.values, vecs)
    return _from_mode_vectors(out, sym.grid, sym.domain)


# --- constraint projection ---------------------------------------------------


@dataclass(frozen=True)
class ConstraintProjector:
    """Orthogonal per-mode projector enforcing the linear side constraint.

    For the divergence-free (leray) constraint the matrix at wavevector kappa
    is I - kappa kappa^T / |kappa|^2; the zero mode is left untouched.
    """

    tag: Constraint
    grid: tuple[int, ...] | None = None
    domain: tuple[float, ...] | None = None

    @classmethod
    def none(cls) -> "ConstraintProjector":
        return cls(Constraint.NONE)

    @classmethod
    def leray(cls, grid, domain) -> "ConstraintProjector":
        return cls(Constraint.LERAY, tuple(grid), tuple(domain))

    @classmethod
    def for_problem(cls, spec: ProblemSpec) -> "ConstraintProjector":
        if spec.constraint is Constraint.LERAY:
            return cls.leray(spec.grid, spec.domain)
        return cls.none()

    def matrices(self) -> np.ndarray:
        """(modes, dim, dim) projector stack (identity at the zero mode)."""
        if self.tag is not Constraint.LERAY:
            raise ValueError("no matrices for the trivial projector")
        dim = len(self.grid)
        kap = np.stack(
            [k.reshape(-1) for k in np.broadcast_arrays(*kappa_arrays(self.grid, self.domain))],
            axis=1,
        )  # (modes, dim)
        ksq = np.sum(kap * kap, axis=1)
        safe = np.where(ksq == 0.0, 1.0, ksq)
        outer = kap[:, :, np.newaxis] * kap[:, np.newaxis, :] / safe[:, np.newaxis, np.newaxis]
        eye = np.eye(dim)[np.newaxis]
        proj = eye - outer
        proj[ksq == 0.0] = np.eye(dim)
        return proj.astype(np.complex128)


def project(proj: ConstraintProjector, field: SpectralField) -> SpectralField:
    """Apply the constraint projector per mode; identity when no constraint."""
    if proj.tag is Constraint.NONE:
        return field
    if field.n_components != field.dim:
        raise ConstraintArityMismatch(
            f"leray projection needs components == dim, got "
            f"{field.n_components} components in {field.dim}D"
        )
    vecs = _to_mode_vectors(field)
    out = backends.active().matvec_modes(proj.matrices(), vecs)
    return _from_mode_vectors(out, field.grid, field.domain)


def spectral_divergence(field: SpectralField) -> float:
    """max_kappa |kappa . v(kappa)|, the spectral divergence magnitude."""
    kap = kappa_arrays(field.grid, field.domain)
    div = sum(k * c for k, c in zip(kap, field.spectral))
    return float(np.abs(div).max())


# --- stationary inversion -----------------------------------------------------


def invert_stationary(
    sym: SymbolMatrix, rhs: SpectralField, proj: ConstraintProjector | None = None
) -> SpectralField:
    """Solve the linear system per mode: values(kappa) @ u(kappa) = rhs(kappa).

    Singular modes are tolerated only where the right-hand side carries no
    energy (they are zeroed in the solution); otherwise ZeroModeSingular is
    raised.  Condition estimates above 1e12 raise IllConditioned.
    """
    if proj is None:
        proj = ConstraintProjector.none()
    if proj.tag is not Constraint.NONE:
        rhs = project(proj, rhs)
    kernels = backends.active()
    ghat = _to_mode_vectors(rhs)
    dets = np.abs(kernels.det_modes(sym.values))
    scale = float(dets.max())
    singular = dets <= SINGULAR_RTOL * scale if scale > 0.0 else np.ones_like(dets, dtype=bool)

    if singular.any():
        rhs_mag = np.abs(ghat).max(axis=1)
        offending = singular & (rhs_mag > RHS_TOL)
        if offending.any():
            flat = int(np.argmax(offending))
            raise ZeroModeSingular(sym.mode_tuple(flat), float(rhs_mag[flat]))

    solution = np.zeros_like(ghat)
    regular = ~singular
    if regular.any():
        mats = np.ascontiguousarray(sym.values[regular])
        inv = kernels.inv_modes(mats)
        conds = _frobenius(mats) * _frobenius(inv)
        if (conds > CONDITION_LIMIT).any():
            local = int(np.argmax(conds > CONDITION_LIMIT))
            flat = int(np.nonzero(regular)[0][local])
            raise IllConditioned(sym.mode_tuple(flat), float(conds[local]))
        solution[regular] = kernels.solve_modes(mats, np.ascontiguousarray(ghat[regular]))

    out = _from_mode_vectors(solution, sym.grid, sym.domain)
    if proj.tag is not Constraint.NONE:
        out = project(proj, out)
    return out


def _frobenius(mats: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(mats) ** 2, axis=(1, 2)))


# --- evolution ----------------------------------------------------------------


def slab_propagator(sym: SymbolMatrix, dt: float) -> np.ndarray:
    """exp(-dt * M(kappa)) per mode, shape (modes, n, n)."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    return backends.active().expm_modes(-dt * sym.values)


def propagate(sym: SymbolMatrix, field: SpectralField, dt: float) -> SpectralField:
    """Advance the homogeneous linear system by dt (exactly, per mode)."""
    out = backends.active().matvec_modes(slab_propagator(sym, dt), _to_mode_vectors(field))
    return _from_mode_vectors(out, sym.grid, sym.domain)


def duhamel_step(
    sym: SymbolMatrix,
    g_sampler: Callable[[SpectralField], SpectralField],
    u0: SpectralField,
    dt: float,
    *,
    propagator: np.ndarray | None = None,
    slab_tol: float = SLAB_TOL,
    max_inner: int = SLAB_MAX_INNER,
) -> SpectralField:
    """One slab of the mild solution via exponential-trapezoid quadrature.

    The slab endpoint satisfies

        u(dt) = E u0 + (dt/2) (E g(u0) + g(u(dt))),   E = exp(-dt M),

    and is found by iterating the right-hand side from the propagated initial
    state until the update drops below ``slab_tol`` in Linf.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    kernels = backends.active()
    E = propagator if propagator is not None else slab_propagator(sym, dt)
    base = kernels.matvec_modes(E, _to_mode_vectors(u0))
    g0 = kernels.matvec_modes(E, _to_mode_vectors(g_sampler(u0)))

    current = _from_mode_vectors(base, sym.grid, sym.domain)
    last_update = np.inf
    for _ in range(max_inner):
        g_now = _to_mode_vectors(g_sampler(current))
        nxt = _from_mode_vectors(base + 0.5 * dt * (g0 + g_now), sym.grid, sym.domain)
        last_update = norm(nxt - current, NormKind.LINF)
        current = nxt
        if last_update <= slab_tol:
            return current
    raise SlabNonConvergence(max_inner, float(last_update))
