"""Backend selection for the hot kernels.

The numba path is used when numba imports and ``VILENTROPY_BACKEND`` is not
``numpy``. Every kernel in :mod:`vilentropy.kernels` has a pure-numpy twin, and
both must return identical results.
"""
from __future__ import annotations

import os
import warnings
from functools import wraps

try:
    import numba as _numba
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _numba = None
    HAVE_NUMBA = False

    def _njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            @wraps(func)
            def wrapper(*a, **kw):
                return func(*a, **kw)

            return wrapper

        return decorator


njit = _njit

_state = {"backend": None}


def _default_backend() -> str:
    requested = os.environ.get("VILENTROPY_BACKEND", "").strip().lower()
    if requested == "numpy" or not HAVE_NUMBA:
        return "numpy"
    return "numba"


def backend() -> str:
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    if _state["backend"] is None:
        _state["backend"] = _default_backend()
    return _state["backend"]


def set_backend(name: str) -> None:
    name = name.lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _state["backend"] = name


def set_workers(workers: int | None) -> None:
    """Cap internal numba threads. Results never depend on this."""
    if workers and HAVE_NUMBA:
        with warnings.catch_warnings():
            # threading-layer probing complains about old TBB builds; harmless here
            warnings.simplefilter("ignore", _numba.NumbaWarning)
            _numba.set_num_threads(max(1, min(int(workers), _numba.config.NUMBA_NUM_THREADS)))
