"""Numba-compiled per-mode linear algebra kernels.

Same contracts as :mod:`pdefix.backends.numpy_backend`, but each stack is
walked in a compiled loop with hand-rolled elimination on the tiny (n <= 4)
per-mode matrices.  This avoids per-matrix LAPACK dispatch overhead, which
dominates when the mode count is large.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import numpy_backend as _np_ref

NAME = "numba"

_B = _np_ref._B
_THETA_13 = _np_ref._THETA_13


@njit(cache=True)
def _det_one(a):
    n = a.shape[0]
    m = a.copy()
    det = 1.0 + 0.0j
    for col in range(n):
        pivot = col
        big = abs(m[col, col])
        for row in range(col + 1, n):
            if abs(m[row, col]) > big:
                big = abs(m[row, col])
                pivot = row
        if big == 0.0:
            return 0.0 + 0.0j
        if pivot != col:
            for c in range(n):
                tmp = m[col, c]
                m[col, c] = m[pivot, c]
                m[pivot, c] = tmp
            det = -det
        det *= m[col, col]
        for row in range(col + 1, n):
            f = m[row, col] / m[col, col]
            for c in range(col + 1, n):
                m[row, c] -= f * m[col, c]
    return det


@njit(cache=True)
def _solve_one(a, b, x):
    """Gaussian elimination with partial pivoting; overwrites a and x."""
    n = a.shape[0]
    for i in range(n):
        x[i] = b[i]
    for col in range(n):
        pivot = col
        big = abs(a[col, col])
        for row in range(col + 1, n):
            if abs(a[row, col]) > big:
                big = abs(a[row, col])
                pivot = row
        if pivot != col:
            for c in range(n):
                tmp = a[col, c]
                a[col, c] = a[pivot, c]
                a[pivot, c] = tmp
            tmp = x[col]
            x[col] = x[pivot]
            x[pivot] = tmp
        piv = a[col, col]
        for row in range(col + 1, n):
            f = a[row, col] / piv
            for c in range(col, n):
                a[row, c] -= f * a[col, c]
            x[row] -= f * x[col]
    for col in range(n - 1, -1, -1):
        s = x[col]
        for c in range(col + 1, n):
            s -= a[col, c] * x[c]
        x[col] = s / a[col, col]


@njit(cache=True)
def _solve_matrix_one(a, b):
    """Solve a @ x = b for matrix b; returns x (both (n, n))."""
    n = a.shape[0]
    out = np.empty((n, n), dtype=np.complex128)
    col_in = np.empty(n, dtype=np.complex128)
    col_out = np.empty(n, dtype=np.complex128)
    for j in range(n):
        work = a.copy()
        for i in range(n):
            col_in[i] = b[i, j]
        _solve_one(work, col_in, col_out)
        for i in range(n):
            out[i, j] = col_out[i]
    return out


@njit(cache=True)
def _det_kernel(mats):
    out = np.empty(mats.shape[0], dtype=np.complex128)
    for m in range(mats.shape[0]):
        out[m] = _det_one(mats[m])
    return out


@njit(cache=True)
def _solve_kernel(mats, vecs):
    nm, n = vecs.shape
    out = np.empty((nm, n), dtype=np.complex128)
    work = np.empty((n, n), dtype=np.complex128)
    for m in range(nm):
        work[:, :] = mats[m]
        _solve_one(work, vecs[m], out[m])
    return out


@njit(cache=True)
def _inv_kernel(mats):
    nm, n = mats.shape[0], mats.shape[1]
    eye = np.eye(n, dtype=np.complex128)
    out = np.empty_like(mats)
    for m in range(nm):
        out[m] = _solve_matrix_one(mats[m], eye)
    return out


@njit(cache=True)
def _matvec_kernel(mats, vecs):
    nm, n = vecs.shape
    out = np.zeros((nm, n), dtype=np.complex128)
    for m in range(nm):
        for i in range(n):
            acc = 0.0 + 0.0j
            for j in range(n):
                acc += mats[m, i, j] * vecs[m, j]
            out[m, i] = acc
    return out


@njit(cache=True)
def _expm_one(a, b_coeffs, theta):
    n = a.shape[0]
    norm = 0.0
    for i in range(n):
        row = 0.0
        for j in range(n):
            row += abs(a[i, j])
        if row > norm:
            norm = row
    squarings = 0
    if norm > theta:
        squarings = int(np.ceil(np.log2(norm / theta)))
    scaled = a / (2.0**squarings)

    a2 = scaled @ scaled
    a4 = a2 @ a2
    a6 = a4 @ a2
    eye = np.eye(n, dtype=np.complex128)
    u = scaled @ (
        a6 @ (b_coeffs[13] * a6 + b_coeffs[11] * a4 + b_coeffs[9] * a2)
        + b_coeffs[7] * a6
        + b_coeffs[5] * a4
        + b_coeffs[3] * a2
        + b_coeffs[1] * eye
    )
    v = (
        a6 @ (b_coeffs[12] * a6 + b_coeffs[10] * a4 + b_coeffs[8] * a2)
        + b_coeffs[6] * a6
        + b_coeffs[4] * a4
        + b_coeffs[2] * a2
        + b_coeffs[0] * eye
    )
    out = _solve_matrix_one(v - u, v + u)
    for _ in range(squarings):
        out = out @ out
    return out


@njit(cache=True)
def _expm_kernel(mats, b_coeffs, theta):
    out = np.empty_like(mats)
    ok = np.ones(mats.shape[0], dtype=np.bool_)
    for m in range(mats.shape[0]):
        e = _expm_one(mats[m], b_coeffs, theta)
        out[m] = e
        if not np.all(np.isfinite(e.real)) or not np.all(np.isfinite(e.imag)):
            ok[m] = False
    return out, ok


def _stack(mats):
    return np.ascontiguousarray(mats, dtype=np.complex128)


def det_modes(mats: np.ndarray) -> np.ndarray:
    return _det_kernel(_stack(mats))


def solve_modes(mats: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    return _solve_kernel(_stack(mats), np.ascontiguousarray(vecs, dtype=np.complex128))


def inv_modes(mats: np.ndarray) -> np.ndarray:
    return _inv_kernel(_stack(mats))


def matvec_modes(mats: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    return _matvec_kernel(_stack(mats), np.ascontiguousarray(vecs, dtype=np.complex128))


_B_ARRAY = np.array(_B)


def expm_modes(mats: np.ndarray) -> np.ndarray:
    out, ok = _expm_kernel(_stack(mats), _B_ARRAY, _THETA_13)
    if not ok.all():
        for idx in np.nonzero(~ok)[0]:
            out[idx] = _np_ref._expm_eig(mats[idx])
    return out
