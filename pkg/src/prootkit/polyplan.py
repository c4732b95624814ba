"""Minimal-multiplication evaluation plans for P_d(X) = I + X + ... + X^d.

The builder repeatedly halves the degree:

    P_d(X) = P_{(d-1)/2}(X^2) (X + I)            d odd, d >= 3
    P_d(X) = P_{(d-2)/2}(X^2) (X^2 + X) + I      d even, d >= 3

with base cases P_1 = X + I (no products) and P_2 = I + X + X^2 (one
squaring).  Each halving level costs one squaring plus one product, and all
levels draw their powers from one shared squaring chain X^2, X^4, X^8, ...
so the chain is paid for once.  The resulting multiplication count is
logarithmic in d; for d = 57 it is exactly 9 (five chained squarings up to
X^32 plus four products).

A plan is a straight-line program over numbered slots (slot 0 holds X) made
of SQUARE, PRODUCT and AFFINE steps; only the first two count as
multiplications.  Plans are immutable and reusable across any number of
evaluations.
"""

from dataclasses import dataclass
from typing import Tuple, Union

from .linalg import as_matrix, identity, matmul


@dataclass(frozen=True)
class Square:
    """slots[dst] = slots[src] @ slots[src]; counts one multiplication."""

    src: int
    dst: int


@dataclass(frozen=True)
class Product:
    """slots[dst] = slots[lhs] @ slots[rhs]; counts one multiplication."""

    lhs: int
    rhs: int
    dst: int


@dataclass(frozen=True)
class Affine:
    """slots[dst] = sum(coef * slots[src]) + identity_coef * I; free."""

    terms: Tuple[Tuple[float, int], ...]
    identity_coef: float
    dst: int


Step = Union[Square, Product, Affine]


@dataclass(frozen=True)
class EvalPlan:
    degree: int
    steps: Tuple[Step, ...]
    result_slot: int
    matmul_cost: int
    n_slots: int


def _halving_trajectory(d):
    """Degrees at each halving level plus the base degree (1 or 2)."""
    levels = []
    cur = d
    while cur >= 3:
        levels.append(cur)
        cur = (cur - 1) // 2
    return levels, cur


def build_plan(d):
    """Straight-line plan evaluating P_d; d == 0 yields the trivial I plan."""
    if d < 0:
        raise ValueError("degree must be nonnegative, got %d" % d)
    steps = []
    next_slot = 1

    def alloc():
        nonlocal next_slot
        slot = next_slot
        next_slot += 1
        return slot

    if d == 0:
        out = alloc()
        steps.append(Affine((), 1.0, out))
        return EvalPlan(0, tuple(steps), out, 0, next_slot)

    levels, base = _halving_trajectory(d)
    n_levels = len(levels)

    # shared squaring chain: chain[j] holds X^(2^j); the P_2 base needs one
    # power beyond the deepest level's variable
    chain_len = n_levels + (1 if base == 2 else 0)
    chain = [0]
    for _ in range(chain_len):
        dst = alloc()
        steps.append(Square(chain[-1], dst))
        chain.append(dst)

    if base == 1:
        value = alloc()
        steps.append(Affine(((1.0, chain[n_levels]),), 1.0, value))
    else:
        value = alloc()
        steps.append(
            Affine(
                ((1.0, chain[n_levels + 1]), (1.0, chain[n_levels])), 1.0, value
            )
        )

    for depth in range(n_levels - 1, -1, -1):
        level_degree = levels[depth]
        y = chain[depth]
        if level_degree % 2 == 1:
            factor = alloc()
            steps.append(Affine(((1.0, y),), 1.0, factor))  # Y + I
            dst = alloc()
            steps.append(Product(value, factor, dst))
            value = dst
        else:
            factor = alloc()
            steps.append(
                Affine(((1.0, chain[depth + 1]), (1.0, y)), 0.0, factor)
            )  # Y^2 + Y
            prod = alloc()
            steps.append(Product(value, factor, prod))
            dst = alloc()
            steps.append(Affine(((1.0, prod),), 1.0, dst))  # + I
            value = dst

    cost = sum(isinstance(s, (Square, Product)) for s in steps)
    return EvalPlan(d, tuple(steps), value, cost, next_slot)


def eval_plan(plan, x, counter):
    """Run the plan on x; counter gains exactly plan.matmul_cost products."""
    x = as_matrix(x)
    if x.shape[0] != x.shape[1]:
        raise ValueError("plan evaluation requires a square matrix")
    n = x.shape[0]
    slots = [None] * plan.n_slots
    slots[0] = x
    for step in plan.steps:
        if isinstance(step, Square):
            src = slots[step.src]
            slots[step.dst] = matmul(src, src, counter)
        elif isinstance(step, Product):
            slots[step.dst] = matmul(slots[step.lhs], slots[step.rhs], counter)
        else:
            acc = step.identity_coef * identity(n)
            for coef, src in step.terms:
                acc += coef * slots[src]
            slots[step.dst] = acc
    return slots[plan.result_slot]


def plan_cost_table(p_min, p_max):
    """(p, multiplications per geometric-form increment step) for each p.

    One step costs the P_{p-2} plan plus two outer products.
    """
    if not 5 <= p_min <= p_max:
        raise ValueError("need 5 <= p_min <= p_max")
    return [
        (p, build_plan(p - 2).matmul_cost + 2) for p in range(p_min, p_max + 1)
    ]


def _power_name(j):
    return "X" if j == 0 else "X^%d" % (2**j,)


def format_factored(d):
    """Render the factored form of P_d the plan evaluates.

    Bottom-up substitution of the halving recursion, e.g. for d = 57:

        {[(X^32+X^16+I)(X^16+X^8)+I][X^4+I][X^4+X^2]+I}{X+I}

    Bracket style varies with nesting depth purely for readability:
    parentheses innermost, square brackets between, braces outermost.
    """
    if d < 0:
        raise ValueError("degree must be nonnegative, got %d" % d)
    if d == 0:
        return "I"
    levels, base = _halving_trajectory(d)
    n_levels = len(levels)

    if base == 1:
        text = "%s+I" % _power_name(n_levels)
    else:
        text = "%s+%s+I" % (_power_name(n_levels + 1), _power_name(n_levels))
    is_sum = True

    def glyphs(depth):
        if depth == n_levels - 1:
            return "()"
        if depth == 0:
            return "{}"
        return "[]"

    for depth in range(n_levels - 1, -1, -1):
        open_, close = glyphs(depth)
        left = open_ + text + close if is_sum else text
        if levels[depth] % 2 == 1:
            factor = "%s%s+I%s" % (open_, _power_name(depth), close)
            text = left + factor
            is_sum = False
        else:
            factor = "%s%s+%s%s" % (
                open_,
                _power_name(depth + 1),
                _power_name(depth),
                close,
            )
            text = left + factor + "+I"
            is_sum = True
    return text
