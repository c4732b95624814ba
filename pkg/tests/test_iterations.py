"""The five root iterations: values, equivalences, counts, stopping."""

import numpy as np
import pytest

from prootkit import (
    ConvergenceError,
    MethodTag,
    OpCounter,
    SingularMatrixError,
    StoppingRule,
    build_plan,
    frob_norm,
    gen_random_spd,
    initial_state,
    precondition,
    residual,
    run,
    step,
    step_coupled,
    step_in,
    step_iter39,
    step_plain,
    step_variant,
)
from prootkit.costmodel import modeled_ops

H_METHODS = (MethodTag.IN, MethodTag.ITER39, MethodTag.VARIANT)
ALL_METHODS = tuple(MethodTag)


def take_steps(a, p, method, k):
    """X_0 .. X_k (and the states) for one method."""
    state = initial_state(a, p, method)
    counter = OpCounter()
    plan = build_plan(p - 2) if method is MethodTag.VARIANT else None
    states = [state]
    for _ in range(k):
        state = step(a, state, counter, plan)
        states.append(state)
    return states


class TestScalarTraces:
    def test_plain_first_step(self):
        a = np.array([[0.25]])
        state = step_plain(a, initial_state(a, 2, MethodTag.PLAIN), OpCounter())
        assert state.x[0, 0] == pytest.approx(0.625, abs=1e-15)

    def test_in_equals_plain_on_scalars(self):
        a = np.array([[0.25]])
        plain = take_steps(a, 2, MethodTag.PLAIN, 4)
        incr = take_steps(a, 2, MethodTag.IN, 4)
        for s_plain, s_in in zip(plain, incr):
            assert s_in.x[0, 0] == pytest.approx(s_plain.x[0, 0], rel=1e-13)

    def test_iter39_first_step_equals_in(self):
        a = np.array([[0.25]])
        s39 = step_iter39(initial_state(a, 2, MethodTag.ITER39), OpCounter())
        s_in = step_in(initial_state(a, 2, MethodTag.IN), OpCounter())
        assert s39.x[0, 0] == pytest.approx(s_in.x[0, 0], rel=1e-14)
        assert s39.aux[0, 0] == pytest.approx(s_in.aux[0, 0], rel=1e-12)

    def test_coupled_first_step(self):
        a = np.diag([0.25])
        state = step_coupled(initial_state(a, 2, MethodTag.COUPLED), OpCounter())
        assert state.x[0, 0] == pytest.approx(0.625, abs=1e-15)
        assert state.aux[0, 0] == pytest.approx(0.25 / 0.625**2, rel=1e-14)

    def test_plain_converges_to_scalar_roots(self):
        a = np.diag([0.09, 0.25])
        states = take_steps(a, 2, MethodTag.PLAIN, 30)
        assert np.allclose(states[-1].x, np.diag([0.3, 0.5]), atol=1e-12)

    def test_scalar_quadratic_convergence(self):
        # error ratio e_{k+1} / e_k^2 stays bounded near the root
        a = np.array([[0.0625]])
        states = take_steps(a, 4, MethodTag.IN, 8)
        root = 0.5
        errors = [abs(s.x[0, 0] - root) for s in states]
        ratios = [
            errors[k + 1] / errors[k] ** 2
            for k in range(len(errors) - 1)
            if errors[k] > 1e-8  # above roundoff floor
        ]
        assert ratios and max(ratios) < 50.0


class TestFixedPoints:
    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_identity_input_is_fixed(self, method):
        a = np.eye(4)
        for state in take_steps(a, 5, method, 3):
            assert np.allclose(state.x, np.eye(4), atol=1e-14)

    @pytest.mark.parametrize("method", H_METHODS)
    def test_zero_increment_stays_zero(self, method):
        # hand-build a converged state: X = A^{1/p} exactly, H = 0
        p = 3
        x = np.diag([0.5, 0.8, 1.0])
        a = np.diag(np.diag(x) ** p)
        state = initial_state(a, p, method)
        state = type(state)(5, x, np.zeros_like(x), method, p)
        nxt = step(a, state, OpCounter(), build_plan(p - 2))
        assert np.allclose(nxt.aux, 0.0, atol=1e-14)
        assert np.array_equal(nxt.x, x)

    def test_coupled_identity_aux_frozen(self):
        p = 4
        x = np.diag([0.7, 0.9])
        state = initial_state(np.eye(2), p, MethodTag.COUPLED)
        state = type(state)(2, x, np.eye(2), MethodTag.COUPLED, p)
        nxt = step_coupled(state, OpCounter())
        assert np.allclose(nxt.x, x, atol=1e-14)
        assert np.allclose(nxt.aux, np.eye(2), atol=1e-14)


class TestCrossMethodAgreement:
    @pytest.mark.parametrize("p", [5, 13])
    def test_x_sequences_coincide(self, p):
        a = gen_random_spd(6, 50.0, seed=7)
        a_tilde = precondition(a, p).a_tilde
        sequences = {m: take_steps(a_tilde, p, m, 8) for m in ALL_METHODS}
        for k in range(9):
            mats = [sequences[m][k].x for m in ALL_METHODS]
            base = mats[0]
            for other in mats[1:]:
                assert frob_norm(other - base) <= 1e-9 * frob_norm(base)

    def test_variant_in_h_identity(self):
        # the geometric-polynomial rewriting is an algebraic identity in H
        for p in (5, 17, 59):
            a = gen_random_spd(5, 30.0, seed=p)
            a_tilde = precondition(a, p).a_tilde
            sv = take_steps(a_tilde, p, MethodTag.VARIANT, 6)
            si = take_steps(a_tilde, p, MethodTag.IN, 6)
            # a_tilde has unit Frobenius norm, so absolute agreement at
            # 1e-12 is machine-level; H itself shrinks below that fast
            for s1, s2 in zip(sv, si):
                assert frob_norm(s1.aux - s2.aux) <= 1e-12
                assert frob_norm(s1.x - s2.x) <= 1e-12

    def test_coupled_tracks_inverse_power(self):
        p = 7
        a = gen_random_spd(8, 20.0, seed=3)
        a_tilde = precondition(a, p).a_tilde
        for state in take_steps(a_tilde, p, MethodTag.COUPLED, 10):
            ref = np.linalg.matrix_power(np.linalg.inv(state.x), p) @ a_tilde
            assert frob_norm(state.aux - ref) <= 1e-9 * frob_norm(a_tilde)


class TestStepCounts:
    @pytest.mark.parametrize("p", [2, 3, 5, 13, 59, 100])
    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_counts_match_model(self, method, p):
        a = gen_random_spd(5, 4.0, seed=11)
        counter = OpCounter()
        plan = build_plan(p - 2) if method is MethodTag.VARIANT else None
        step(a, initial_state(a, p, method), counter, plan)
        products, lus = modeled_ops(method, p)
        assert (counter.matmul_count, counter.lu_count) == (products, lus)

    def test_variant_counts_plan_plus_two(self):
        p = 59
        plan = build_plan(p - 2)
        a = gen_random_spd(10, 10.0, seed=5)
        counter = OpCounter()
        step_variant(initial_state(a, p, MethodTag.VARIANT), plan, counter)
        assert counter.matmul_count == plan.matmul_cost + 2 == 11
        assert counter.lu_count == 1

    def test_iter39_p59_count(self):
        a = gen_random_spd(6, 10.0, seed=6)
        counter = OpCounter()
        step_iter39(initial_state(a, 59, MethodTag.ITER39), counter)
        assert (counter.matmul_count, counter.lu_count) == (10, 1)

    def test_plan_degree_mismatch_rejected(self):
        a = gen_random_spd(4, 4.0, seed=2)
        with pytest.raises(ValueError):
            step_variant(
                initial_state(a, 7, MethodTag.VARIANT),
                build_plan(3),
                OpCounter(),
            )


class TestRun:
    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_identity_converges_immediately(self, method):
        x, rep = run(np.eye(5), 7, method)
        assert np.array_equal(x, np.eye(5))
        assert rep.iterations == 0
        assert rep.rows[0].residual == 0.0
        assert rep.stop_reason == "residual"

    def test_scalar_quartic_root(self):
        stop = StoppingRule(tol=1e-15, h_tol=1e-14, max_iter=50)
        x, rep = run(np.diag([0.0625]), 4, MethodTag.IN, stop)
        assert abs(x[0, 0] - 0.5) < 1e-12
        assert rep.iterations <= 25
        assert rep.final_residual < 1e-14

    def test_preconditioned_spd_long_root(self, backend):
        a = gen_random_spd(20, 380.0, seed=42)
        a_tilde = precondition(a, 59).a_tilde
        counter = OpCounter()
        x, rep = run(a_tilde, 59, MethodTag.VARIANT, counter=counter)
        assert rep.final_residual <= 1e-12
        assert residual(a_tilde, x, 59) == rep.rows[-1].residual
        # counter snapshots in the report are cumulative and consistent
        assert rep.rows[-1].cum_matmuls == counter.matmul_count
        assert rep.rows[-1].cum_flop_estimate == counter.flop_estimate

    def test_rows_strictly_ordered(self):
        _, rep = run(np.diag([0.2, 0.7]), 3, MethodTag.VARIANT)
        ks = [row.k for row in rep.rows]
        assert ks == sorted(set(ks))

    def test_nonconvergence_carries_report(self):
        a = gen_random_spd(6, 100.0, seed=1)
        a_tilde = precondition(a, 31).a_tilde
        with pytest.raises(ConvergenceError) as info:
            run(a_tilde, 31, MethodTag.IN, StoppingRule(tol=0.0, h_tol=0.0, max_iter=3))
        rep = info.value.report
        assert rep is not None
        assert rep.stop_reason == "max_iter"
        assert len(rep.rows) == 4  # rows 0..3

    def test_midrun_singularity_reports_iteration(self):
        # a negative real eigenvalue breaks the hypothesis; the plain
        # iteration on diag(-1) hits an exactly singular iterate at k=1
        a = np.diag([-1.0])
        with pytest.raises(SingularMatrixError) as info:
            run(a, 2, MethodTag.PLAIN, StoppingRule(max_iter=10))
        assert "iteration" in str(info.value)

    def test_stability_after_convergence(self):
        # keep stepping past convergence; the residual must not blow up
        p = 9
        a = gen_random_spd(12, 50.0, seed=9)
        a_tilde = precondition(a, p).a_tilde
        x, rep = run(a_tilde, p, MethodTag.VARIANT)
        plan = build_plan(p - 2)
        state = initial_state(a_tilde, p, MethodTag.VARIANT)
        counter = OpCounter()
        for _ in range(rep.iterations):  # deterministic replay of the run
            state = step_variant(state, plan, counter)
        assert np.array_equal(state.x, x)
        base = rep.final_residual
        for _ in range(20):
            state = step_variant(state, plan, counter)
            assert residual(a_tilde, state.x, p) <= 10.0 * max(base, 1e-16)

    def test_invalid_p_rejected(self):
        with pytest.raises(ValueError):
            run(np.eye(3), 1, MethodTag.VARIANT)
