"""Five Newton-type iterations for the principal matrix p-th root.

All methods start from X_0 = I and, in exact arithmetic, generate the same
X_k sequence: they are algebraic rearrangements of the classic Newton step

    X' = ((p-1) X + A X^{1-p}) / p.

They differ in what they carry between steps and in per-step cost:

* ``plain``    recomputes A X^{1-p} each step from X alone.
* ``in``       carries the additive correction H (X' = X + H) and updates it
               through the weighted geometric sum sum_{i<p-1} (i+1) F^i of
               F = X X'^{-1}; the reference-cost form, linear in p.
* ``iter39``   rebuilds H from powers F^{p-1}, F^p obtained by binary
               powering; logarithmic in p.
* ``coupled``  carries N = X^{-p} A alongside X; self-correcting and
               numerically stable, cost logarithmic in p.
* ``variant``  the centrepiece: updates H through the geometric polynomial
               P_{p-2}(F) evaluated by a precomputed halving plan, making
               the incremental update logarithmic in p as well.

Each step consumes and produces an :class:`IterationState` and charges its
matrix products and LU divisions to an :class:`~prootkit.linalg.OpCounter`.
:func:`run` drives any method under a :class:`StoppingRule` and returns the
final iterate plus a per-iteration :class:`~prootkit.report.ConvergenceReport`;
residual evaluation is reporting overhead and is neither counted nor timed.
"""

import enum
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, SingularMatrixError
from .linalg import (
    OpCounter,
    as_matrix,
    axpy_affine,
    frob_norm,
    identity,
    lu_solve_right,
    matmul,
    power_naive,
)
from .polyplan import build_plan, eval_plan
from .report import ConvergenceReport, ReportRow


class MethodTag(enum.Enum):
    PLAIN = "plain"
    IN = "in"
    ITER39 = "iter39"
    COUPLED = "coupled"
    VARIANT = "variant"


#: methods that carry the additive correction H in ``aux``
_H_METHODS = frozenset({MethodTag.IN, MethodTag.ITER39, MethodTag.VARIANT})


@dataclass(frozen=True)
class IterationState:
    """One iterate: X_k plus the method's companion matrix.

    ``aux`` holds H_k for the correction-carrying methods, N_k for the
    coupled method, and a zero matrix for the plain method.
    """

    k: int
    x: np.ndarray
    aux: np.ndarray
    method: MethodTag
    p: int


@dataclass(frozen=True)
class StoppingRule:
    """Stop on small residual, small relative increment, or step budget."""

    tol: float = 1e-13
    h_tol: float = 1e-14
    max_iter: int = 100


def initial_state(a, p, method):
    """Canonical starting state: X_0 = I with the method's companion."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("input matrix must be square")
    if int(p) != p or p < 2:
        raise ValueError("p must be an integer >= 2, got %r" % (p,))
    p = int(p)
    n = a.shape[0]
    x = identity(n)
    if method in _H_METHODS:
        aux = (a - x) / p
    elif method is MethodTag.COUPLED:
        aux = a.copy()
    elif method is MethodTag.PLAIN:
        aux = np.zeros_like(a)
    else:
        raise ValueError("unknown method %r" % (method,))
    return IterationState(0, x, aux, method, p)


def residual(a, x, p):
    """Relative residual ||x^p - a||_F / ||a||_F (uncounted)."""
    xp = power_naive(x, p, OpCounter())
    return frob_norm(xp - a) / frob_norm(a)


def step_plain(a, state, counter):
    """X' = ((p-1) X + A X^{1-p}) / p; one LU plus binary powering."""
    p = state.p
    y = power_naive(state.x, p - 1, counter)
    t = lu_solve_right(a, y, counter)  # A X^{1-p}
    x1 = axpy_affine((p - 1) / p, state.x, 1.0 / p, t, 0.0)
    return IterationState(state.k + 1, x1, state.aux, state.method, p)


def _weighted_geometric_sum(f, p, counter):
    """sum_{i=0}^{p-2} (i+1) F^i via running powers; p-3 products for p >= 3."""
    s = identity(f.shape[0])
    g = None
    for i in range(1, p - 1):
        g = f.copy() if g is None else matmul(g, f, counter)
        s += (i + 1) * g
    return s


def step_in(state, counter):
    """Correction update through the weighted geometric sum (literal form).

    H' = -(1/p) H X'^{-1} (sum_{i=0}^{p-2} (i+1) F^i) H with X' = X + H and
    F = X X'^{-1}.  Costs (p-1) products plus two LU divisions per step,
    i.e. (2p + 10/3) n^3 flops.
    """
    p = state.p
    x1 = state.x + state.aux
    f = lu_solve_right(state.x, x1, counter)
    s = _weighted_geometric_sum(f, p, counter)
    u = lu_solve_right(state.aux, x1, counter)  # H X'^{-1}
    w = u if p == 2 else matmul(u, s, counter)  # s == I when p == 2
    h1 = (-1.0 / p) * matmul(w, state.aux, counter)
    return IterationState(state.k + 1, x1, h1, state.method, p)


def step_iter39(state, counter):
    """Correction rebuilt from high powers of F: logarithmic in p.

    H' = -X' ((I - F^p)/p + F^{p-1} (F - I)); the bracket collapses to the
    scaled affine combination ((p-1)/p) F^p - F^{p-1} + (1/p) I, and F^{p-1},
    F^p share one binary powering chain.
    """
    p = state.p
    x1 = state.x + state.aux
    f = lu_solve_right(state.x, x1, counter)
    g = power_naive(f, p - 1, counter)
    fp = matmul(g, f, counter)
    bracket = axpy_affine((p - 1) / p, fp, -1.0, g, 1.0 / p)
    h1 = -matmul(x1, bracket, counter)
    return IterationState(state.k + 1, x1, h1, state.method, p)


def step_coupled(state, counter):
    """X' = X M, N' = M^{-p} N with M = ((p-1) I + N) / p."""
    p = state.p
    m = axpy_affine(1.0 / p, state.aux, 0.0, state.aux, (p - 1) / p)
    x1 = matmul(state.x, m, counter)
    z = lu_solve_right(identity(m.shape[0]), m, counter)
    w = power_naive(z, p, counter)
    n1 = matmul(w, state.aux, counter)
    return IterationState(state.k + 1, x1, n1, state.method, p)


def step_variant(state, plan, counter):
    """Correction update through the geometric polynomial plan.

    H' = -(1/p) ((p I - (p-1) F) P_{p-2}(F) - (p-1) I) H, with P_{p-2}(F)
    evaluated by the halving plan; exactly plan.matmul_cost + 2 products
    plus one LU division per step.
    """
    p = state.p
    if plan.degree != p - 2:
        raise ValueError(
            "plan degree %d does not match p-2 = %d" % (plan.degree, p - 2)
        )
    x1 = state.x + state.aux
    f = lu_solve_right(state.x, x1, counter)
    poly = eval_plan(plan, f, counter)
    b = axpy_affine(-(p - 1.0), f, 0.0, f, float(p))  # p I - (p-1) F
    c = matmul(b, poly, counter)
    d = axpy_affine(1.0, c, 0.0, c, -(p - 1.0))
    h1 = (-1.0 / p) * matmul(d, state.aux, counter)
    return IterationState(state.k + 1, x1, h1, state.method, p)


def step(a, state, counter, plan=None):
    """Dispatch one step of ``state.method``."""
    method = state.method
    if method is MethodTag.PLAIN:
        return step_plain(a, state, counter)
    if method is MethodTag.IN:
        return step_in(state, counter)
    if method is MethodTag.ITER39:
        return step_iter39(state, counter)
    if method is MethodTag.COUPLED:
        return step_coupled(state, counter)
    if method is MethodTag.VARIANT:
        if plan is None:
            plan = build_plan(state.p - 2)
        return step_variant(state, plan, counter)
    raise ValueError("unknown method %r" % (method,))


def _increment_measure(state, prev_x):
    """Relative size of the pending (or, failing that, last) correction."""
    if state.method in _H_METHODS:
        return frob_norm(state.aux) / frob_norm(state.x)
    if prev_x is None:
        return math.inf
    return frob_norm(state.x - prev_x) / frob_norm(prev_x)


def run(a, p, method, stop=StoppingRule(), counter=None, label="matrix"):
    """Iterate ``method`` on ``a`` until the stopping rule fires.

    Returns (X, report).  The caller is responsible for ``a`` having its
    spectrum in the global-convergence region (see
    :mod:`prootkit.precondition`); non-convergence within the step budget
    raises :class:`~prootkit.errors.ConvergenceError` carrying the partial
    report, and a singular division mid-run raises
    :class:`~prootkit.errors.SingularMatrixError` tagged with the iteration
    index.
    """
    a = as_matrix(a)
    if counter is None:
        counter = OpCounter()
    state = initial_state(a, p, method)
    p = state.p
    plan = build_plan(p - 2) if method is MethodTag.VARIANT else None
    rep = ConvergenceReport(
        method=method.value, p=p, n=a.shape[0], matrix_label=label
    )
    prev_x = None
    wall_ms = 0.0
    while True:
        r = residual(a, state.x, p)
        inc = _increment_measure(state, prev_x)
        rep.append(
            ReportRow(
                k=state.k,
                residual=r,
                increment_norm=inc,
                wall_ms=wall_ms,
                cum_matmuls=counter.matmul_count,
                cum_lu=counter.lu_count,
                cum_flop_estimate=counter.flop_estimate,
            )
        )
        if r <= stop.tol:
            rep.stop_reason = "residual"
            break
        if inc <= stop.h_tol:
            rep.stop_reason = "increment"
            break
        if state.k >= stop.max_iter:
            rep.stop_reason = "max_iter"
            raise ConvergenceError(
                "%s did not converge for p=%d within %d iterations "
                "(residual %.3e)" % (method.value, p, stop.max_iter, r),
                report=rep,
            )
        prev_x = state.x
        t0 = time.perf_counter()
        try:
            state = step(a, state, counter, plan)
        except SingularMatrixError as exc:
            rep.stop_reason = "singular"
            raise SingularMatrixError(
                "singular division at iteration %d: %s" % (state.k, exc),
                pivot_index=exc.pivot_index,
            ) from exc
        wall_ms = (time.perf_counter() - t0) * 1e3
    return state.x, rep
