"""Spectrum placement for global convergence, and root recovery.

The iterations converge from X_0 = I when every eigenvalue z of the input
satisfies Re z > 0 and |z| <= 1.  For a matrix A with no nonpositive real
eigenvalues, A_tilde = A^{1/2} / ||A^{1/2}||_F lands in that region: the
square root halves every eigenvalue argument into (-pi/2, pi/2) and the
norm scaling pins |z| <= 1.  The p-th root of A itself is then recovered
from Y = A_tilde^{1/p} as

    A^{1/p} = c^{2/p} Y^2,  c = ||A^{1/2}||_F,

since A = c^2 A_tilde^2 and A_tilde commutes with its own root.
"""

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import ConvergenceError
from .iterations import MethodTag, StoppingRule, run
from .linalg import OpCounter, as_matrix, frob_norm


@dataclass(frozen=True)
class PreconditionedProblem:
    """A with its scaled square root A_tilde and the scale that undoes it."""

    a_tilde: np.ndarray
    scale: float
    original: np.ndarray
    p: int


def sqrt_newton(a, counter, stop=StoppingRule()):
    """Principal square root via the coupled iteration at p = 2.

    The input is scaled by 1/||a||_F first so its spectrum satisfies
    |z| <= 1, run to convergence, and the root rescaled by sqrt(||a||_F).
    """
    a = as_matrix(a)
    scale = frob_norm(a)
    if scale == 0.0:
        raise ValueError("cannot take the square root of the zero matrix")
    try:
        x, _ = run(
            a / scale, 2, MethodTag.COUPLED, stop, counter, label="sqrt"
        )
    except ConvergenceError as exc:
        raise ConvergenceError(
            "square root iteration did not converge; the input's spectrum "
            "may include nonpositive real eigenvalues (%s)" % (exc,),
            report=exc.report,
        ) from exc
    return sqrt(scale) * x


def precondition(a, p, counter=None):
    """Map a to the convergence region: A_tilde = A^{1/2}/||A^{1/2}||_F."""
    a = as_matrix(a)
    if counter is None:
        counter = OpCounter()
    root = sqrt_newton(a, counter)
    scale = frob_norm(root)
    return PreconditionedProblem(root / scale, scale, a, int(p))


def recover_root(problem, y):
    """Root of the original matrix from y = A_tilde^{1/p}."""
    y = as_matrix(y)
    return problem.scale ** (2.0 / problem.p) * (y @ y)
