"""Core field types: multi-indices, wavevectors, and periodic grid fields.

A :class:`SpectralField` keeps an N-component real field on a periodic
rectangular grid together with its discrete Fourier coefficients.  The
transform convention is fixed throughout the package: the forward transform
divides by the total number of grid points, so the zero-frequency coefficient
equals the field mean.  All arithmetic is 64-bit; spectral coefficients are
complex128.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch

MIN_GRID = 8
MAX_GRID = 256

# i**n for n mod 4, kept exact so derivative symbols of integer frequencies
# come out without transcendental round-off.
_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


class NormKind(Enum):
    L2 = "l2"
    LINF = "linf"


@dataclass(frozen=True)
class MultiIndex:
    """Per-axis derivative orders; order() is the total derivative order."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        if len(self.exponents) == 0:
            raise DimensionMismatch("multi-index needs at least one axis")
        for e in self.exponents:
            if not isinstance(e, (int, np.integer)) or e < 0:
                raise ValueError(f"multi-index entries must be non-negative integers, got {e!r}")
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))

    @property
    def order(self) -> int:
        return sum(self.exponents)

    def __len__(self) -> int:
        return len(self.exponents)

    @classmethod
    def zero(cls, dim: int) -> "MultiIndex":
        return cls((0,) * dim)


@dataclass(frozen=True)
class WaveVector:
    """Integer mode numbers on a periodic box plus their radian frequencies."""

    modes: tuple[int, ...]
    kappas: tuple[float, ...]

    @classmethod
    def for_box(cls, modes: Sequence[int], lengths: Sequence[float]) -> "WaveVector":
        if len(modes) != len(lengths):
            raise DimensionMismatch(
                f"{len(modes)} modes vs {len(lengths)} axis lengths"
            )
        kap = tuple(2.0 * np.pi * m / L for m, L in zip(modes, lengths))
        return cls(tuple(int(m) for m in modes), kap)

    def __len__(self) -> int:
        return len(self.modes)


def fourier_symbol(alpha: MultiIndex, kappa: "WaveVector | Sequence[float]") -> complex:
    """Symbol of the mixed derivative described by ``alpha`` at frequency ``kappa``.

    Returns the product over axes of (i*kappa_j)**alpha_j.  Integer powers of
    the imaginary unit are taken from a lookup table so integer frequencies
    evaluate exactly.
    """
    kap = kappa.kappas if isinstance(kappa, WaveVector) else tuple(kappa)
    if len(alpha) != len(kap):
        raise DimensionMismatch(
            f"multi-index arity {len(alpha)} vs wavevector arity {len(kap)}"
        )
    out = 1.0 + 0.0j
    for a, k in zip(alpha.exponents, kap):
        out *= _I_POW[a % 4] * float(k) ** a
    return out


def _validate_grid(grid: tuple[int, ...]):
    for g in grid:
        if g < MIN_GRID or g > MAX_GRID or (g & (g - 1)) != 0:
            raise ValueError(
                f"grid sizes must be powers of two in [{MIN_GRID}, {MAX_GRID}], got {g}"
            )


def mode_arrays(grid: Sequence[int]) -> list[np.ndarray]:
    """Integer mode numbers per axis in FFT storage order."""
    return [np.rint(np.fft.fftfreq(g) * g).astype(np.int64) for g in grid]


def kappa_arrays(grid: Sequence[int], domain: Sequence[float]) -> list[np.ndarray]:
    """Radian frequencies per axis, broadcastable against the grid shape."""
    dim = len(grid)
    out = []
    for ax, (g, L) in enumerate(zip(grid, domain)):
        k = 2.0 * np.pi * np.rint(np.fft.fftfreq(g) * g) / L
        shape = [1] * dim
        shape[ax] = g
        out.append(k.reshape(shape))
    return out


def axis_coordinates(grid: Sequence[int], domain: Sequence[float]) -> list[np.ndarray]:
    """Grid coordinates x_j = L_j * i / g_j, broadcastable against the grid shape."""
    dim = len(grid)
    out = []
    for ax, (g, L) in enumerate(zip(grid, domain)):
        x = np.arange(g) * (L / g)
        shape = [1] * dim
        shape[ax] = g
        out.append(x.reshape(shape))
    return out


def symbol_values(alpha: MultiIndex, grid: Sequence[int], domain: Sequence[float]) -> np.ndarray:
    """Derivative symbol evaluated on the full wavevector mesh (shape = grid)."""
    if len(alpha) != len(grid):
        raise DimensionMismatch(
            f"multi-index arity {len(alpha)} vs spatial dimension {len(grid)}"
        )
    out = np.ones(tuple(grid), dtype=np.complex128)
    for a, kap in zip(alpha.exponents, kappa_arrays(grid, domain)):
        if a:
            out = out * (_I_POW[a % 4] * kap**a)
    return out


def dealias_mask(grid: Sequence[int]) -> np.ndarray:
    """Boolean mask keeping modes with |m_j| <= g_j // 3 on every axis (2/3 rule)."""
    dim = len(grid)
    mask = np.ones(tuple(grid), dtype=bool)
    for ax, (g, modes) in enumerate(zip(grid, mode_arrays(grid))):
        shape = [1] * dim
        shape[ax] = g
        mask &= (np.abs(modes) <= g // 3).reshape(shape)
    return mask


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class SpectralField:
    """Immutable N-component field on a periodic box with paired views.

    Either view may be supplied at construction; the other is computed on
    first access through the forward/inverse FFT and cached.  Arrays are
    locked read-only, so fields are safe to share across threads.
    """

    __slots__ = ("_domain", "_physical", "_spectral")

    def __init__(self, domain: Sequence[float], physical=None, spectral=None):
        if physical is None and spectral is None:
            raise ValueError("need a physical or spectral array")
        ref = physical if physical is not None else spectral
        if ref.ndim < 2:
            raise ValueError("field arrays are indexed (component, grid...)")
        grid = ref.shape[1:]
        _validate_grid(grid)
        domain = tuple(float(L) for L in domain)
        if len(domain) != len(grid):
            raise DimensionMismatch(
                f"{len(domain)} axis lengths vs {len(grid)}-dimensional grid"
            )
        if any(L <= 0 for L in domain):
            raise ValueError("axis lengths must be positive")
        self._domain = domain
        self._physical = None
        self._spectral = None
        if physical is not None:
            self._physical = _freeze(np.ascontiguousarray(physical, dtype=np.float64))
        if spectral is not None:
            if spectral.shape != ref.shape:
                raise DimensionMismatch("physical and spectral shapes differ")
            self._spectral = _freeze(np.ascontiguousarray(spectral, dtype=np.complex128))

    # -- constructors -------------------------------------------------

    @classmethod
    def from_physical(cls, values: np.ndarray, domain: Sequence[float]) -> "SpectralField":
        return cls(domain, physical=np.asarray(values))

    @classmethod
    def from_spectral(cls, coeffs: np.ndarray, domain: Sequence[float]) -> "SpectralField":
        return cls(domain, spectral=np.asarray(coeffs))

    @classmethod
    def zeros(cls, components: int, grid: Sequence[int], domain: Sequence[float]) -> "SpectralField":
        return cls(domain, physical=np.zeros((components, *grid)))

    # -- shape ----------------------------------------------------------

    @property
    def domain(self) -> tuple[float, ...]:
        return self._domain

    @property
    def grid(self) -> tuple[int, ...]:
        ref = self._physical if self._physical is not None else self._spectral
        return ref.shape[1:]

    @property
    def dim(self) -> int:
        return len(self._domain)

    @property
    def n_components(self) -> int:
        ref = self._physical if self._physical is not None else self._spectral
        return ref.shape[0]

    @property
    def spatial_axes(self) -> tuple[int, ...]:
        return tuple(range(1, self.dim + 1))

    # -- views ------------------------------------------------------------

    @property
    def physical(self) -> np.ndarray:
        if self._physical is None:
            self._physical = _freeze(
                np.fft.ifftn(self._spectral, axes=self.spatial_axes, norm="forward").real
            )
        return self._physical

    @property
    def spectral(self) -> np.ndarray:
        if self._spectral is None:
            self._spectral = _freeze(
                np.fft.fftn(self._physical, axes=self.spatial_axes, norm="forward")
            )
        return self._spectral

    # -- arithmetic (pointwise, exact linear combinations) ---------------

    def _like(self, values: np.ndarray) -> "SpectralField":
        return SpectralField(self._domain, physical=values)

    def _check_compatible(self, other: "SpectralField"):
        if (
            self.grid != other.grid
            or self.n_components != other.n_components
            or self._domain != other._domain
        ):
            raise DimensionMismatch("fields live on different grids")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return self._like(self.physical + other.physical)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return self._like(self.physical - other.physical)

    def __mul__(self, scalar: float) -> "SpectralField":
        return self._like(self.physical * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return self._like(-self.physical)

    def component(self, k: int) -> np.ndarray:
        return self.physical[k]


def cell_volume(grid: Sequence[int], domain: Sequence[float]) -> float:
    vol = 1.0
    for g, L in zip(grid, domain):
        vol *= L / g
    return vol


def norm(field: SpectralField, kind: NormKind = NormKind.L2) -> float:
    """Discrete L2 (Riemann-sum weighted) or Linf norm over all components."""
    v = field.physical
    if kind is NormKind.L2:
        return float(np.sqrt(cell_volume(field.grid, field.domain) * np.sum(v * v)))
    if kind is NormKind.LINF:
        return float(np.max(np.abs(v))) if v.size else 0.0
    raise ValueError(f"unknown norm kind {kind!r}")
