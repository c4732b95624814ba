"""Pure Python kernel backend, backed by NumPy/SciPy.

Mirrors the interface of the compiled ``_kernels`` extension: ``gemm``,
``lu_factor`` and ``lu_solve``.  ``lu_factor`` must not raise on singular
input; the caller applies its own pivot tolerance to the returned diagonal.
"""

import warnings

import numpy as np
import scipy.linalg

NAME = "python"


def gemm(a, b):
    """Dense product of two float64 matrices."""
    return a @ b


def lu_factor(a):
    """LU with partial pivoting; returns (lu, piv) in LAPACK getrf layout."""
    with warnings.catch_warnings():
        # scipy warns instead of raising on exactly singular input; the
        # caller inspects the U diagonal itself.
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        return scipy.linalg.lu_factor(a, check_finite=False)


def lu_solve(lu, piv, b):
    """Solve A x = b given the getrf factorization of A."""
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
