"""Evaluation plans for the geometric polynomial P_d."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prootkit import OpCounter, build_plan, eval_plan, format_factored, plan_cost_table
from prootkit.polyplan import Affine, Product, Square


def horner_poly(x, d):
    """P_d(x) = I + x + ... + x^d by Horner's rule, the independent oracle."""
    n = x.shape[0]
    acc = np.eye(n)
    for _ in range(d):
        acc = x @ acc + np.eye(n)
    return acc


class TestBuildPlan:
    def test_d57_costs_nine(self):
        assert build_plan(57).matmul_cost == 9

    def test_d1_free(self):
        assert build_plan(1).matmul_cost == 0

    def test_d2_one_squaring(self):
        assert build_plan(2).matmul_cost == 1

    def test_d3_structure(self):
        # one halving: P_3 = (X^2 + I)(X + I), two multiplications
        plan = build_plan(3)
        assert plan.matmul_cost == 2
        assert format_factored(3) == "(X^2+I)(X+I)"

    def test_d0_trivial_identity_plan(self, rng):
        plan = build_plan(0)
        assert plan.matmul_cost == 0
        x = rng.standard_normal((3, 3))
        assert np.array_equal(eval_plan(plan, x, OpCounter()), np.eye(3))

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            build_plan(-1)

    @pytest.mark.parametrize("d", range(2, 101))
    def test_never_worse_than_naive(self, d):
        assert build_plan(d).matmul_cost <= d - 1

    @pytest.mark.parametrize("d", range(1, 101))
    def test_squaring_chain_is_shared(self, d):
        squares = sum(isinstance(s, Square) for s in build_plan(d).steps)
        assert squares <= math.floor(math.log2(d)) + 1

    def test_cost_counts_product_steps(self):
        for d in (0, 1, 2, 5, 31, 57, 98):
            plan = build_plan(d)
            counted = sum(
                isinstance(s, (Square, Product)) for s in plan.steps
            )
            assert plan.matmul_cost == counted

    def test_slots_defined_before_use(self):
        for d in (1, 2, 17, 57, 98):
            plan = build_plan(d)
            defined = {0}
            for step in plan.steps:
                if isinstance(step, Square):
                    assert step.src in defined
                elif isinstance(step, Product):
                    assert step.lhs in defined and step.rhs in defined
                else:
                    assert all(src in defined for _, src in step.terms)
                defined.add(step.dst)
            assert plan.result_slot in defined


class TestEvalPlan:
    def test_zero_matrix_gives_identity(self):
        for d in (0, 1, 2, 9, 57):
            out = eval_plan(build_plan(d), np.zeros((4, 4)), OpCounter())
            assert np.allclose(out, np.eye(4), atol=1e-15)

    def test_identity_gives_term_count(self):
        for d in (0, 1, 2, 10, 57):
            out = eval_plan(build_plan(d), np.eye(3), OpCounter())
            assert np.allclose(out, (d + 1) * np.eye(3), atol=1e-12)

    def test_counter_increase_equals_cost(self, backend, rng):
        for d in (0, 1, 2, 3, 57, 98):
            plan = build_plan(d)
            counter = OpCounter()
            eval_plan(plan, rng.uniform(-0.5, 0.5, (4, 4)), counter)
            assert counter.matmul_count == plan.matmul_cost

    def test_d57_matches_horner(self, backend, rng):
        plan = build_plan(57)
        x = rng.uniform(-0.4, 0.4, (5, 5))
        out = eval_plan(plan, x, OpCounter())
        ref = horner_poly(x, 57)
        assert np.linalg.norm(out - ref) <= 1e-11 * np.linalg.norm(ref)

    def test_oracle_equivalence_sweep(self, rng):
        # every degree, a bundle of random inputs with entries in [-0.5, 0.5]
        xs = [rng.uniform(-0.5, 0.5, (4, 4)) for _ in range(20)]
        for d in range(0, 101):
            plan = build_plan(d)
            for x in xs[: 4 if d > 20 else 20]:
                out = eval_plan(plan, x, OpCounter())
                ref = horner_poly(x, d)
                assert (
                    np.linalg.norm(out - ref) <= 1e-11 * np.linalg.norm(ref)
                ), "plan for d=%d disagrees with Horner" % d

    @given(d=st.integers(min_value=0, max_value=60), seed=st.integers(0, 2**16))
    @settings(max_examples=40, deadline=None)
    def test_oracle_equivalence_property(self, d, seed):
        x = np.random.default_rng(seed).uniform(-0.5, 0.5, (3, 3))
        out = eval_plan(build_plan(d), x, OpCounter())
        ref = horner_poly(x, d)
        assert np.linalg.norm(out - ref) <= 1e-11 * max(1.0, np.linalg.norm(ref))

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            eval_plan(build_plan(3), np.ones((2, 3)), OpCounter())


class TestCostTable:
    def test_p59_total(self):
        table = dict(plan_cost_table(59, 59))
        assert table[59] == 11

    def test_p5_total(self):
        assert dict(plan_cost_table(5, 5))[5] == 4

    def test_p100_total(self):
        assert dict(plan_cost_table(100, 100))[100] == 13

    def test_range_validation(self):
        with pytest.raises(ValueError):
            plan_cost_table(4, 10)

    def test_closed_form_law_over_published_range(self):
        # Claimed: per-step products m(P_{p-2}) + 2 == floor(2 log2(p-1))
        # for every p in [5, 100].  Violations must be listed by p.
        violations = []
        for p, total in plan_cost_table(5, 100):
            law = math.floor(2 * math.log2(p - 1))
            if total != law:
                violations.append((p, total, law))
        assert not violations, (
            "closed-form product-count law violated at p = %s; "
            "(p, counted, closed-form) = %s"
            % ([v[0] for v in violations], violations)
        )


class TestFormatFactored:
    def test_d57_exact_rendering(self):
        assert (
            format_factored(57)
            == "{[(X^32+X^16+I)(X^16+X^8)+I][X^4+I][X^4+X^2]+I}{X+I}"
        )

    def test_tiny_degrees(self):
        assert format_factored(0) == "I"
        assert format_factored(1) == "X+I"
        assert format_factored(2) == "X^2+X+I"

    @pytest.mark.parametrize("d", range(0, 101))
    def test_rendering_matches_plan_value(self, d):
        # evaluate the printed expression itself and compare with the plan
        class Term:
            def __init__(self, a):
                self.a = a

            def __add__(self, other):
                return Term(self.a + other.a)

            def __mul__(self, other):
                return Term(self.a @ other.a)

            def __pow__(self, e):
                return Term(np.linalg.matrix_power(self.a, e))

        x = np.random.default_rng(d).uniform(-0.4, 0.4, (3, 3))
        expr = format_factored(d)
        for pair in ("{}", "[]"):
            expr = expr.replace(pair[0], "(").replace(pair[1], ")")
        expr = expr.replace(")(", ")*(").replace("^", "**")
        env = {"X": Term(x), "I": Term(np.eye(3))}
        value = eval(expr, {"__builtins__": {}}, env).a
        ref = eval_plan(build_plan(d), x, OpCounter())
        assert np.linalg.norm(value - ref) <= 1e-11 * max(
            1.0, np.linalg.norm(ref)
        )
