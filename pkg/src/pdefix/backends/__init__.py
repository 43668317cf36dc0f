"""Per-mode linear algebra kernels with selectable backend.

The numba backend compiles the per-mode loops and is used by default when
numba imports cleanly.  Set ``PDEFIX_BACKEND=numpy`` in the environment to
force the pure-numpy fallback (or ``PDEFIX_BACKEND=numba`` to insist on the
compiled path and fail loudly if numba is missing).

``benchmarks/bench_backends.py`` compares the two paths head to head.
"""

from __future__ import annotations

import os

from . import numpy_backend

_ENV_VAR = "PDEFIX_BACKEND"


def _resolve(name: str | None):
    if name in (None, "", "auto"):
        try:
            from . import numba_backend

            return numba_backend
        except ImportError:
            return numpy_backend
    if name == "numpy":
        return numpy_backend
    if name == "numba":
        from . import numba_backend

        return numba_backend
    raise ValueError(f"{_ENV_VAR} must be 'numpy', 'numba', or 'auto', not {name!r}")


_active = _resolve(os.environ.get(_ENV_VAR))


def active():
    """The module providing det/solve/inv/matvec/expm mode kernels."""
    return _active


def use_backend(name: str):
    """Programmatic override of the kernel backend ('numpy', 'numba', 'auto')."""
    global _active
    _active = _resolve(name)
    return _active
