"""Kernel backend selection.

Two interchangeable kernel sets exist: the compiled Cython extension
(``prootkit._kernels``) and the pure NumPy/SciPy fallback
(``prootkit._kernels_py``).  The compiled one is used when it imports
cleanly; ``PROOTKIT_BACKEND=python`` or ``=compiled`` forces the choice at
import time, and :func:`use_backend` switches it at runtime (mainly for
tests and the backend benchmark).

Backend choice never changes counted operation totals, only who executes
them.
"""

import os

from . import _kernels_py

_BACKENDS = {"python": _kernels_py}

try:
    from . import _kernels as _kernels_c
except ImportError:
    _kernels_c = None
else:
    _BACKENDS["compiled"] = _kernels_c


def available_backends():
    """Names of the kernel backends that imported successfully."""
    return sorted(_BACKENDS)


def _default():
    forced = os.environ.get("PROOTKIT_BACKEND", "").strip().lower()
    if forced:
        if forced not in _BACKENDS:
            raise ImportError(
                "PROOTKIT_BACKEND=%r but available backends are %s"
                % (forced, available_backends())
            )
        return _BACKENDS[forced]
    return _BACKENDS.get("compiled", _kernels_py)


_active = _default()


def get_backend():
    """The module object providing gemm / lu_factor / lu_solve."""
    return _active


def backend_name():
    return _active.NAME


def use_backend(name):
    """Switch the active backend; returns the previous backend's name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(
            "unknown backend %r; available: %s" % (name, available_backends())
        )
    previous = _active.NAME
    _active = _BACKENDS[name]
    return previous
