import numpy as np
import pytest

from pdefix import SpectralField
from pdefix.fields import dealias_mask

TWO_PI = 2.0 * np.pi


def random_smooth_field(rng, components, grid, domain=None, amplitude=1.0):
    """Random real field band-limited to the 2/3 dealiasing band."""
    domain = domain if domain is not None else (TWO_PI,) * len(grid)
    raw = rng.standard_normal((components, *grid))
    coeffs = np.fft.fftn(raw, axes=tuple(range(1, len(grid) + 1)), norm="forward")
    coeffs *= dealias_mask(grid)
    smooth = np.fft.ifftn(coeffs, axes=tuple(range(1, len(grid) + 1)), norm="forward").real
    peak = np.abs(smooth).max()
    if peak > 0:
        smooth *= amplitude / peak
    return SpectralField.from_physical(smooth, domain)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
