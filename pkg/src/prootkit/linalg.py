"""Dense real matrix arithmetic with an operation-counting layer.

Matrices are square C-contiguous float64 ``numpy.ndarray`` objects
throughout.  Every n-cubed primitive routes through this module so that an
:class:`OpCounter` can account for it: a dense product costs ``2 n^3`` flops
and an LU-based right division costs ``8/3 n^3`` (factorization ``2/3 n^3``
plus two triangular solves against n right-hand sides).  Lower-order work
(norms, scaled sums) is never counted.

The counter keeps ``flop_estimate`` as an exact ``fractions.Fraction`` so
cost-model comparisons are equality checks, not float comparisons.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._backend import get_backend
from .errors import SingularMatrixError

# first pivot with |u_kk| below this times ||denominator||_F is singular
PIVOT_RTOL = 1e-14

MATMUL_FLOPS = Fraction(2)  # coefficient of n^3 for one dense product
LU_FLOPS = Fraction(8, 3)  # coefficient of n^3 for one right division


@dataclass
class OpCounter:
    """Tally of counted n^3 primitives and their modeled flops."""

    matmul_count: int = 0
    lu_count: int = 0
    flop_estimate: Fraction = field(default_factory=lambda: Fraction(0))

    def add_matmul(self, n):
        self.matmul_count += 1
        self.flop_estimate += MATMUL_FLOPS * n**3

    def add_lu(self, n):
        self.lu_count += 1
        self.flop_estimate += LU_FLOPS * n**3

    def snapshot(self):
        """(matmul_count, lu_count, flop_estimate) as an immutable tuple."""
        return (self.matmul_count, self.lu_count, self.flop_estimate)


def as_matrix(a):
    """Coerce to a C-contiguous float64 2-D array without copying if possible."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("expected a 2-D array, got ndim=%d" % m.ndim)
    return m


def _require_square(a, what):
    if a.shape[0] != a.shape[1]:
        raise ValueError("%s must be square, got shape %s" % (what, a.shape))


def identity(n):
    return np.eye(n, dtype=np.float64)


def matmul(a, b, counter):
    """Dense product a @ b; counted when both operands are square n x n."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(
            "cannot multiply %s by %s: inner dimensions differ"
            % (a.shape, b.shape)
        )
    out = get_backend().gemm(a, b)
    if a.shape[0] == a.shape[1] and b.shape[0] == b.shape[1]:
        counter.add_matmul(a.shape[0])
    return out


def frob_norm(a):
    """Frobenius norm: square root of the sum of squared entries."""
    a = np.asarray(a, dtype=np.float64)
    return float(np.sqrt((a * a).sum()))


def axpy_affine(alpha, a, beta, b, gamma):
    """alpha*a + beta*b + gamma*I, costing no counted multiplications."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError("shape mismatch: %s vs %s" % (a.shape, b.shape))
    out = alpha * a + beta * b
    if gamma != 0.0:
        _require_square(a, "affine identity term")
        out.flat[:: a.shape[0] + 1] += gamma
    return out


def _checked_lu_factor(denominator):
    """Factor, then apply the relative pivot tolerance to the U diagonal."""
    lu, piv = get_backend().lu_factor(denominator)
    tol = PIVOT_RTOL * frob_norm(denominator)
    diag = np.abs(np.diagonal(lu))
    # an exactly zero pivot is singular at any scale, including the
    # degenerate all-zero denominator where the relative threshold is 0
    small = np.flatnonzero((diag < tol) | (diag == 0.0))
    if small.size:
        k = int(small[0])
        raise SingularMatrixError(
            "denominator singular to working precision: pivot %d has "
            "magnitude %.3e < %.3e" % (k, diag[k], tol),
            pivot_index=k,
        )
    return lu, piv


def lu_solve_right(numerator, denominator, counter):
    """numerator @ denominator^{-1} via one LU factorization.

    Solves F @ denominator == numerator by factoring denominator^T and
    solving for F^T; counts one LU (8/3 n^3).
    """
    numerator = as_matrix(numerator)
    denominator = as_matrix(denominator)
    _require_square(denominator, "denominator")
    if numerator.shape[1] != denominator.shape[0]:
        raise ValueError(
            "numerator shape %s does not match denominator shape %s"
            % (numerator.shape, denominator.shape)
        )
    backend = get_backend()
    lu, piv = _checked_lu_factor(np.ascontiguousarray(denominator.T))
    ft = backend.lu_solve(lu, piv, np.ascontiguousarray(numerator.T))
    counter.add_lu(denominator.shape[0])
    return np.ascontiguousarray(ft.T)


def power_naive(a, e, counter):
    """a**e by left-to-right binary powering; every product is counted.

    e == 0 returns the identity (by convention, costing nothing); e == 1
    returns a copy.  For e >= 2 the product count is
    floor(log2 e) + popcount(e) - 1.
    """
    a = as_matrix(a)
    _require_square(a, "power base")
    if e < 0:
        raise ValueError("exponent must be nonnegative, got %d" % e)
    if e == 0:
        return identity(a.shape[0])
    result = a.copy()
    for bit in bin(e)[3:]:  # bits below the leading one, most significant first
        result = matmul(result, result, counter)
        if bit == "1":
            result = matmul(result, a, counter)
    return result


def binary_power_count(e):
    """Counted products used by :func:`power_naive` for exponent e."""
    if e <= 1:
        return 0
    return e.bit_length() - 1 + bin(e).count("1") - 1
