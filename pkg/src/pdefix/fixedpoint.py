"""Damped Picard iteration on the integral form of the system.

Each stationary sweep replaces the right-hand side by the modified forcing
(forcing minus the nonlinear part at the current iterate), inverts the linear
part per mode, and blends with the previous iterate.  Evolution problems
march time slabs whose inner sweep is the same fixed-point iteration.  The
trace records update norms, differential residuals, and empirical contraction
ratios so non-contractive problems are flagged instead of looping silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceDetected, InsufficientData, MaxIterExceeded
from .expressions import EvalContext, evaluate
from .fields import NormKind, SpectralField, norm
from .problem import Kind, ProblemSpec
from .spectral import (
    ConstraintProjector,
    assemble_symbol,
    duhamel_step,
    invert_stationary,
    project,
    slab_propagator,
)
from .verification import differential_residual


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-10
    max_iter: int = 200
    damping: float = 1.0
    divergence_window: int = 5
    norm: NormKind = NormKind.L2

    def __post_init__(self):
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.divergence_window < 1:
            raise ValueError("divergence_window must be at least 1")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    update_norm: float
    residual_norm: float | None
    contraction_ratio: float | None
    iterate_norm: float


@dataclass
class ConvergenceTrace:
    """Append-only per-iteration diagnostics of one solve."""

    records: list[IterationRecord] = field(default_factory=list)

    def append(self, record: IterationRecord):
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def update_norms(self) -> list[float]:
        return [r.update_norm for r in self.records]

    @property
    def ratios(self) -> list[float]:
        return [r.contraction_ratio for r in self.records if r.contraction_ratio is not None]


@dataclass
class IterationState:
    """Mutable state owned by a single solve."""

    current: SpectralField
    previous: SpectralField | None
    modified: SpectralField | None
    iteration: int
    trace: ConvergenceTrace


def modified_forcing(spec: ProblemSpec, u: SpectralField) -> SpectralField:
    """Forcing minus the nonlinear part at u, componentwise and dealiased."""
    out = spec.forcing_field.physical.copy()
    ctx = EvalContext(u, spec.base_forcing_field)
    for k, term in enumerate(spec.split.nonlinear):
        if term is not None:
            out[k] -= evaluate(term, ctx)
    return SpectralField.from_physical(out, spec.domain)


def estimate_contraction(trace: ConvergenceTrace) -> float:
    """Geometric mean of the last few contraction ratios (empirical Lipschitz)."""
    if len(trace) < 3:
        raise InsufficientData(
            f"contraction estimate needs at least 3 recorded iterations, have {len(trace)}"
        )
    ratios = trace.ratios
    if not ratios:
        raise InsufficientData("no contraction ratios recorded")
    tail = ratios[-min(5, len(ratios)) :]
    return float(math.prod(tail) ** (1.0 / len(tail)))


def _ratio(update: float, previous: float | None) -> float | None:
    if previous is None or previous == 0.0:
        return None
    return update / previous


def picard_solve(
    spec: ProblemSpec,
    u0: SpectralField | None = None,
    opts: SolverOptions = SolverOptions(),
) -> tuple[SpectralField, ConvergenceTrace]:
    """Solve the system by fixed-point iteration (or slab marching).

    Returns the final iterate and the full trace.  Raises DivergenceDetected
    when the empirical contraction ratio stays at or above one for
    ``divergence_window`` consecutive iterations or any norm turns non-finite,
    and MaxIterExceeded when the budget runs out first.
    """
    if spec.kind is Kind.STATIONARY:
        return _solve_stationary(spec, u0, opts)
    return _solve_evolution(spec, u0, opts)


def _solve_stationary(spec, u0, opts) -> tuple[SpectralField, ConvergenceTrace]:
    sym = assemble_symbol(spec.split.linear, spec.dim, spec.domain, spec.grid)
    proj = ConstraintProjector.for_problem(spec)
    state = IterationState(
        current=u0 if u0 is not None else SpectralField.zeros(spec.n_components, spec.grid, spec.domain),
        previous=None,
        modified=None,
        iteration=0,
        trace=ConvergenceTrace(),
    )
    previous_update: float | None = None
    expanding = 0

    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(1, opts.max_iter + 1):
            state.modified = modified_forcing(spec, state.current)
            image = invert_stationary(sym, state.modified, proj)
            if opts.damping == 1.0:
                nxt = image
            else:
                nxt = state.current + opts.damping * (image - state.current)

            update = norm(nxt - state.current, opts.norm)
            iterate_norm = norm(nxt, opts.norm)
            ratio = _ratio(update, previous_update)
            finite = math.isfinite(update) and math.isfinite(iterate_norm)
            residual = (
                differential_residual(spec, nxt, opts.tol).overall if finite else math.inf
            )
            state.trace.append(
                IterationRecord(m, update, residual, ratio, iterate_norm)
            )
            state.previous, state.current, state.iteration = state.current, nxt, m

            if not finite:
                raise DivergenceDetected(m, "update or iterate norm is non-finite")
            expanding = expanding + 1 if (ratio is not None and ratio >= 1.0) else 0
            if expanding >= opts.divergence_window:
                raise DivergenceDetected(
                    m,
                    f"contraction ratio >= 1 for {expanding} consecutive iterations "
                    f"(last {ratio:.3f})",
                )
            if update <= opts.tol * (1.0 + iterate_norm):
                return state.current, state.trace
            previous_update = update

    raise MaxIterExceeded(opts.max_iter, state.trace.records[-1].update_norm)


def _solve_evolution(spec, u0, opts) -> tuple[SpectralField, ConvergenceTrace]:
    sym = assemble_symbol(spec.split.linear, spec.dim, spec.domain, spec.grid)
    proj = ConstraintProjector.for_problem(spec)

    def g_sampler(w: SpectralField) -> SpectralField:
        return project(proj, modified_forcing(spec, w))

    current = project(proj, u0 if u0 is not None else spec.initial_field())
    trace = ConvergenceTrace()
    previous_update: float | None = None

    n_full = int(math.floor(spec.t_final / spec.dt + 1e-9))
    remainder = spec.t_final - n_full * spec.dt
    steps: list[float] = [spec.dt] * n_full
    if remainder > 1e-9 * spec.dt:
        steps.append(remainder)

    propagator = slab_propagator(sym, spec.dt) if n_full else None
    with np.errstate(over="ignore", invalid="ignore"):
        for slab, dt in enumerate(steps, start=1):
            E = propagator if dt == spec.dt else slab_propagator(sym, dt)
            nxt = duhamel_step(sym, g_sampler, current, dt, propagator=E)
            update = norm(nxt - current, opts.norm)
            iterate_norm = norm(nxt, opts.norm)
            trace.append(
                IterationRecord(slab, update, None, _ratio(update, previous_update), iterate_norm)
            )
            if not (math.isfinite(update) and math.isfinite(iterate_norm)):
                raise DivergenceDetected(slab, "slab update or state norm is non-finite")
            current = nxt
            previous_update = update

    return current, trace
