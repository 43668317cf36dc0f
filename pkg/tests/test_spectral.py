import numpy as np
import pytest

from pdefix import (
    MultiIndex,
    NormKind,
    SlabNonConvergence,
    SpectralField,
    ZeroModeSingular,
    apply_linear,
    assemble_symbol,
    duhamel_step,
    invert_stationary,
    norm,
    project,
    propagate,
    spectral_divergence,
)
from pdefix.fields import axis_coordinates, mode_arrays
from pdefix.spectral import ConstraintProjector
from pdefix.splitting import LinearOperator, LinearTerm

from conftest import TWO_PI, random_smooth_field


def operator_1d(*terms):
    rows = tuple(LinearTerm(0, 0, c, MultiIndex((a,))) for c, a in terms)
    return LinearOperator(1, 1, (rows,))


def flat_index_of_mode(grid, mode):
    modes = mode_arrays(grid)
    multi = tuple(int(np.nonzero(m == v)[0][0]) for m, v in zip(modes, mode))
    return int(np.ravel_multi_index(multi, grid))


class TestAssembly:
    def test_helmholtz_symbol(self):
        # -u'' + u has symbol kappa^2 + 1
        sym = assemble_symbol(operator_1d((-1.0, 2), (1.0, 0)), 1, (TWO_PI,), (16,))
        idx = flat_index_of_mode((16,), (3,))
        assert sym.values[idx, 0, 0] == pytest.approx(10.0)

    def test_empty_operator_is_zero(self):
        sym = assemble_symbol(LinearOperator(1, 1, ((),)), 1, (TWO_PI,), (16,))
        assert np.abs(sym.values).max() == 0.0

    def test_transport_coupling(self):
        terms = (
            (LinearTerm(0, 1, 1.0, MultiIndex((1,))),),
            (LinearTerm(1, 0, 1.0, MultiIndex((1,))),),
        )
        sym = assemble_symbol(LinearOperator(2, 1, terms), 1, (TWO_PI,), (16,))
        idx = flat_index_of_mode((16,), (2,))
        expected = np.array([[0.0, 2.0j], [2.0j, 0.0]])
        assert np.abs(sym.values[idx] - expected).max() < 1e-14

    def test_conjugate_symmetry(self):
        sym = assemble_symbol(operator_1d((1.0, 1), (2.0, 2)), 1, (TWO_PI,), (16,))
        plus = flat_index_of_mode((16,), (5,))
        minus = flat_index_of_mode((16,), (-5,))
        assert np.abs(sym.values[plus] - np.conj(sym.values[minus])).max() < 1e-14


class TestInvertStationary:
    def test_helmholtz_sine(self):
        # (-D^2 + 1) u = sin(x)  =>  u = sin(x) / 2
        sym = assemble_symbol(operator_1d((-1.0, 2), (1.0, 0)), 1, (TWO_PI,), (32,))
        x = axis_coordinates((32,), (TWO_PI,))[0]
        rhs = SpectralField.from_physical(np.sin(x)[np.newaxis], (TWO_PI,))
        u = invert_stationary(sym, rhs)
        assert np.abs(u.physical[0] - 0.5 * np.sin(x)).max() <= 1e-12

    def test_identity_returns_rhs(self, rng):
        sym = assemble_symbol(operator_1d((1.0, 0)), 1, (TWO_PI,), (32,))
        rhs = random_smooth_field(rng, 1, (32,))
        u = invert_stationary(sym, rhs)
        assert np.abs(u.physical - rhs.physical).max() <= 1e-12

    def test_zero_mode_singular(self):
        # -D^2 has a null zero mode; a mean in the rhs must be flagged
        sym = assemble_symbol(operator_1d((-1.0, 2)), 1, (TWO_PI,), (16,))
        rhs = SpectralField.from_physical(np.ones((1, 16)), (TWO_PI,))
        with pytest.raises(ZeroModeSingular) as err:
            invert_stationary(sym, rhs)
        assert err.value.mode == (0,)

    def test_singular_mode_with_clean_rhs_is_zeroed(self):
        sym = assemble_symbol(operator_1d((-1.0, 2)), 1, (TWO_PI,), (16,))
        x = axis_coordinates((16,), (TWO_PI,))[0]
        rhs = SpectralField.from_physical(np.sin(x)[np.newaxis], (TWO_PI,))
        u = invert_stationary(sym, rhs)
        assert abs(u.spectral[0][0]) == 0.0
        assert np.abs(u.physical[0] - np.sin(x)).max() <= 1e-12

    def test_inversion_consistency(self, rng):
        sym = assemble_symbol(
            operator_1d((-0.3, 2), (1.0, 0), (0.5, 1)), 1, (TWO_PI,), (32,)
        )
        for _ in range(100):
            rhs = random_smooth_field(rng, 1, (32,))
            u = invert_stationary(sym, rhs)
            back = apply_linear(sym, u)
            scale = 1.0 + np.abs(rhs.physical).max()
            assert np.abs(back.physical - rhs.physical).max() <= 1e-12 * scale


class TestPropagate:
    def heat_symbol(self, grid=16):
        return assemble_symbol(operator_1d((-1.0, 2)), 1, (TWO_PI,), (grid,))

    def test_heat_mode_decay(self):
        sym = self.heat_symbol()
        x = axis_coordinates((16,), (TWO_PI,))[0]
        u0 = SpectralField.from_physical(np.sin(x)[np.newaxis], (TWO_PI,))
        u = propagate(sym, u0, 0.5)
        expected = u0.spectral[0][1] * np.exp(-0.5)
        assert u.spectral[0][1] == pytest.approx(expected, rel=1e-13)

    def test_zero_dt_is_identity(self, rng):
        sym = self.heat_symbol()
        u0 = random_smooth_field(rng, 1, (16,))
        u = propagate(sym, u0, 0.0)
        assert np.abs(u.physical - u0.physical).max() < 1e-13

    def test_semigroup(self, rng):
        sym = self.heat_symbol()
        u0 = random_smooth_field(rng, 1, (16,))
        one = propagate(sym, propagate(sym, u0, 0.3), 0.45)
        two = propagate(sym, u0, 0.75)
        scale = 1.0 + np.abs(two.physical).max()
        assert np.abs(one.physical - two.physical).max() <= 1e-12 * scale

    def test_diffusive_propagator_contracts_l2(self, rng):
        sym = self.heat_symbol()
        u0 = random_smooth_field(rng, 1, (16,))
        u1 = propagate(sym, u0, 0.2)
        assert norm(u1, NormKind.L2) <= norm(u0, NormKind.L2) * (1 + 1e-12)


class TestDuhamel:
    def test_zero_integrand_matches_propagate(self, rng):
        sym = assemble_symbol(operator_1d((-1.0, 2), (1.0, 0)), 1, (TWO_PI,), (16,))
        u0 = random_smooth_field(rng, 1, (16,))
        zero = SpectralField.zeros(1, (16,), (TWO_PI,))
        stepped = duhamel_step(sym, lambda w: zero, u0, 0.25)
        direct = propagate(sym, u0, 0.25)
        assert np.abs(stepped.physical - direct.physical).max() < 1e-13

    def test_constant_source_slab_error_is_third_order(self):
        # u' = -u + c with c = 0.7, u0 = 0.3: exact endpoint is
        # u0 e^{-dt} + c (1 - e^{-dt}); the trapezoid slab error scales as dt^3
        sym = assemble_symbol(operator_1d((1.0, 0)), 1, (TWO_PI,), (8,))
        c = 0.7
        u0 = SpectralField.from_physical(np.full((1, 8), 0.3), (TWO_PI,))
        source = SpectralField.from_physical(np.full((1, 8), c), (TWO_PI,))

        def slab_error(dt):
            stepped = duhamel_step(sym, lambda w: source, u0, dt)
            exact = 0.3 * np.exp(-dt) + c * (1.0 - np.exp(-dt))
            return abs(stepped.physical[0, 0] - exact)

        ratio = slab_error(0.1) / slab_error(0.05)
        assert ratio == pytest.approx(8.0, abs=1.0)

    def test_non_contractive_slab_flagged(self, rng):
        # g has Lipschitz constant 100; dt/2 * 100 >> 1 cannot contract
        sym = assemble_symbol(operator_1d((1.0, 0)), 1, (TWO_PI,), (8,))
        u0 = random_smooth_field(rng, 1, (8,))
        with pytest.raises(SlabNonConvergence):
            duhamel_step(sym, lambda w: 100.0 * w, u0, 1.0)


class TestLerayProjection:
    def grid2d(self):
        return (16, 16), (TWO_PI, TWO_PI)

    def test_gradient_field_annihilated(self):
        grid, domain = self.grid2d()
        x, y = axis_coordinates(grid, domain)
        g = np.cos(x + y)
        field = SpectralField.from_physical(
            np.stack([np.broadcast_to(g, grid)] * 2), domain
        )
        projected = project(ConstraintProjector.leray(grid, domain), field)
        assert np.abs(projected.physical).max() <= 1e-12

    def test_divergence_free_field_unchanged(self):
        grid, domain = self.grid2d()
        x, y = axis_coordinates(grid, domain)
        u = np.cos(x) * np.sin(y)
        v = -np.sin(x) * np.cos(y)
        field = SpectralField.from_physical(
            np.stack([np.broadcast_to(u, grid), np.broadcast_to(v, grid)]), domain
        )
        projected = project(ConstraintProjector.leray(grid, domain), field)
        assert np.abs(projected.physical - field.physical).max() <= 1e-12

    def test_idempotent(self, rng):
        grid, domain = self.grid2d()
        field = random_smooth_field(rng, 2, grid)
        proj = ConstraintProjector.leray(grid, domain)
        once = project(proj, field)
        twice = project(proj, once)
        assert np.abs(twice.physical - once.physical).max() <= 1e-12

    def test_projector_matrices(self):
        grid, domain = self.grid2d()
        mats = ConstraintProjector.leray(grid, domain).matrices()
        # P^2 = P entrywise
        assert np.abs(np.einsum("mij,mjk->mik", mats, mats) - mats).max() <= 1e-14
        zero = flat_index_of_mode(grid, (0, 0))
        assert np.abs(mats[zero] - np.eye(2)).max() == 0.0

    def test_projection_kills_spectral_divergence(self, rng):
        grid, domain = self.grid2d()
        field = random_smooth_field(rng, 2, grid)
        projected = project(ConstraintProjector.leray(grid, domain), field)
        scale = np.abs(projected.spectral).max()
        assert spectral_divergence(projected) <= 1e-12 * max(1.0, scale)
