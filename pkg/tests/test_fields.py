import numpy as np
import pytest

from pdefix import (
    DimensionMismatch,
    MultiIndex,
    NormKind,
    SpectralField,
    WaveVector,
    fourier_symbol,
    norm,
)
from pdefix.fields import axis_coordinates, symbol_values

from conftest import TWO_PI, random_smooth_field


class TestMultiIndex:
    def test_order(self):
        assert MultiIndex((2, 0, 1)).order == 3

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            MultiIndex((1, -1))

    def test_zero(self):
        assert MultiIndex.zero(2).exponents == (0, 0)


class TestFourierSymbol:
    def test_second_derivative(self):
        # (3i)^2 = -9, exactly
        assert fourier_symbol(MultiIndex((2,)), (3.0,)) == complex(-9.0, 0.0)

    def test_empty_product(self):
        assert fourier_symbol(MultiIndex((0, 0)), (5.0, -7.0)) == complex(1.0, 0.0)

    def test_mixed_first_order(self):
        assert fourier_symbol(MultiIndex((1, 1)), (2.0, 3.0)) == complex(-6.0, 0.0)

    def test_wavevector_argument(self):
        wv = WaveVector.for_box((3,), (TWO_PI,))
        assert fourier_symbol(MultiIndex((2,)), wv) == pytest.approx(-9.0)

    def test_arity_mismatch(self):
        with pytest.raises(DimensionMismatch):
            fourier_symbol(MultiIndex((1, 1)), (2.0,))

    def test_exponent_additivity(self, rng):
        # symbol(alpha + beta) == symbol(alpha) * symbol(beta)
        for _ in range(200):
            dim = rng.integers(1, 4)
            alpha = MultiIndex(tuple(rng.integers(0, 4, dim)))
            beta = MultiIndex(tuple(rng.integers(0, 4, dim)))
            kappa = tuple(float(k) for k in rng.integers(-8, 9, dim))
            combined = MultiIndex(tuple(a + b for a, b in zip(alpha.exponents, beta.exponents)))
            lhs = fourier_symbol(combined, kappa)
            rhs = fourier_symbol(alpha, kappa) * fourier_symbol(beta, kappa)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


class TestTransforms:
    def test_constant_field_mean_convention(self):
        f = SpectralField.from_physical(np.full((1, 16), 3.5), (TWO_PI,))
        coeffs = f.spectral[0]
        assert coeffs[0] == pytest.approx(3.5)
        assert np.abs(coeffs[1:]).max() < 1e-15

    def test_sine_coefficients(self):
        x = axis_coordinates((8,), (TWO_PI,))[0]
        f = SpectralField.from_physical(np.sin(x)[np.newaxis], (TWO_PI,))
        coeffs = f.spectral[0]
        assert coeffs[1] == pytest.approx(-0.5j, abs=1e-15)
        assert coeffs[-1] == pytest.approx(0.5j, abs=1e-15)
        others = np.delete(coeffs, [1, 7])
        assert np.abs(others).max() < 1e-15

    @pytest.mark.parametrize("grid", [(32,), (16, 8), (8, 8, 8)])
    def test_round_trip(self, rng, grid):
        f = random_smooth_field(rng, 2, grid)
        back = SpectralField.from_spectral(f.spectral, f.domain)
        err = np.abs(back.physical - f.physical).max()
        assert err <= 1e-12 * max(1.0, np.abs(f.physical).max())

    def test_conjugate_symmetry(self, rng):
        f = random_smooth_field(rng, 1, (16, 16))
        c = f.spectral[0]
        flipped = np.conj(c[np.ix_(-np.arange(16) % 16, -np.arange(16) % 16)])
        assert np.abs(c - flipped).max() < 1e-14

    def test_parseval_thousand_fields(self):
        rng = np.random.default_rng(7)
        shapes = [(1, (32,)), (2, (16, 16)), (1, (8, 8, 8))]
        checked = 0
        while checked < 1000:
            comps, grid = shapes[checked % len(shapes)]
            f = random_smooth_field(rng, comps, grid)
            vol = np.prod([L / g for L, g in zip(f.domain, grid)])
            phys = np.sqrt(vol * np.sum(f.physical**2))
            box = np.prod(f.domain)
            spec = np.sqrt(box * np.sum(np.abs(f.spectral) ** 2))
            assert abs(phys - spec) <= 1e-12 * (1.0 + phys)
            checked += 1

    def test_immutable_views(self, rng):
        f = random_smooth_field(rng, 1, (8,))
        with pytest.raises(ValueError):
            f.physical[0, 0] = 1.0
        with pytest.raises(ValueError):
            f.spectral[0, 0] = 1.0

    def test_grid_must_be_power_of_two(self):
        with pytest.raises(ValueError):
            SpectralField.from_physical(np.zeros((1, 12)), (TWO_PI,))
        with pytest.raises(ValueError):
            SpectralField.from_physical(np.zeros((1, 4)), (TWO_PI,))


class TestDifferentiation:
    @pytest.mark.parametrize("grid", [8, 16, 64])
    def test_sine_derivative(self, grid):
        x = axis_coordinates((grid,), (TWO_PI,))[0]
        f = SpectralField.from_physical(np.sin(x)[np.newaxis], (TWO_PI,))
        sym = symbol_values(MultiIndex((1,)), (grid,), (TWO_PI,))
        der = np.fft.ifft(sym * f.spectral[0], norm="forward").real
        assert np.abs(der - np.cos(x)).max() <= 1e-12


class TestNorms:
    def test_zero_field(self):
        f = SpectralField.zeros(2, (16,), (TWO_PI,))
        assert norm(f, NormKind.L2) == 0.0
        assert norm(f, NormKind.LINF) == 0.0

    def test_sine_l2(self):
        x = axis_coordinates((64,), (TWO_PI,))[0]
        f = SpectralField.from_physical(np.sin(x)[np.newaxis], (TWO_PI,))
        assert norm(f, NormKind.L2) == pytest.approx(np.sqrt(np.pi), abs=1e-12)

    def test_scaled_sine_linf(self):
        x = axis_coordinates((64,), (TWO_PI,))[0]
        f = SpectralField.from_physical((2.0 * np.sin(x))[np.newaxis], (TWO_PI,))
        assert norm(f, NormKind.LINF) == 2.0 * np.abs(np.sin(x)).max()
