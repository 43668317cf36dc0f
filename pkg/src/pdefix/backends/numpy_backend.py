"""Vectorized numpy implementations of the per-mode linear algebra kernels.

All kernels operate on stacks: ``mats`` has shape (modes, n, n) complex128 and
``vecs`` has shape (modes, n).  This is the fallback path when numba is
unavailable or disabled; results agree with the numba backend to round-off.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

# Pade-13 numerator coefficients for the matrix exponential
# (scaling-and-squaring; good to ~1e-13 for double precision).
_B = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA_13 = 5.371920351148152


def det_modes(mats: np.ndarray) -> np.ndarray:
    return np.linalg.det(mats)


def solve_modes(mats: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    return np.linalg.solve(mats, vecs[..., np.newaxis])[..., 0]


def inv_modes(mats: np.ndarray) -> np.ndarray:
    return np.linalg.inv(mats)


def matvec_modes(mats: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    return np.einsum("mij,mj->mi", mats, vecs)


def _expm_pade13(mats: np.ndarray) -> np.ndarray:
    n = mats.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=np.complex128), mats.shape)
    a2 = mats @ mats
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = mats @ (
        a6 @ (_B[13] * a6 + _B[11] * a4 + _B[9] * a2)
        + _B[7] * a6
        + _B[5] * a4
        + _B[3] * a2
        + _B[1] * eye
    )
    v = (
        a6 @ (_B[12] * a6 + _B[10] * a4 + _B[8] * a2)
        + _B[6] * a6
        + _B[4] * a4
        + _B[2] * a2
        + _B[0] * eye
    )
    return np.linalg.solve(v - u, v + u)


def _expm_eig(mat: np.ndarray) -> np.ndarray:
    w, vecs = np.linalg.eig(mat)
    return vecs @ (np.exp(w)[:, np.newaxis] * np.linalg.inv(vecs))


def expm_modes(mats: np.ndarray) -> np.ndarray:
    """exp(mats) per mode via scaling-and-squaring with Pade-13.

    Modes whose Pade result comes out non-finite are redone through an
    eigendecomposition.
    """
    norms = np.abs(mats).sum(axis=-1).max(axis=-1)  # 1-norm of each matrix
    max_norm = float(norms.max()) if norms.size else 0.0
    squarings = max(0, int(np.ceil(np.log2(max_norm / _THETA_13))) if max_norm > _THETA_13 else 0)
    out = _expm_pade13(mats / (2.0**squarings))
    for _ in range(squarings):
        out = out @ out
    bad = ~np.isfinite(out).all(axis=(-2, -1))
    if bad.any():
        for idx in np.nonzero(bad)[0]:
            out[idx] = _expm_eig(mats[idx])
    return out
