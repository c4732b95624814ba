"""Cross-backend checks: the compiled kernels and the NumPy/SciPy fallback
must be interchangeable everywhere the library uses them."""

import numpy as np
import pytest

from prootkit import (
    MethodTag,
    OpCounter,
    SingularMatrixError,
    StoppingRule,
    available_backends,
    backend_name,
    frob_norm,
    lu_solve_right,
    matmul,
    run,
    use_backend,
)
from prootkit._backend import get_backend


def test_both_backends_present():
    # this build compiles the extension; the fallback always imports
    assert available_backends() == ["compiled", "python"]


def test_backend_modules_report_their_names():
    prev = use_backend("python")
    try:
        assert backend_name() == "python"
        assert get_backend().NAME == "python"
        use_backend("compiled")
        assert backend_name() == "compiled"
        assert get_backend().NAME == "compiled"
    finally:
        use_backend(prev)


def test_use_backend_returns_previous_name():
    first = backend_name()
    prev = use_backend("python")
    try:
        assert prev == first
        assert use_backend("compiled") == "python"
    finally:
        use_backend(first)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        use_backend("fortran")


def _run_on(backend, fn):
    prev = use_backend(backend)
    try:
        return fn()
    finally:
        use_backend(prev)


class TestKernelAgreement:
    def test_gemm_matches_across_backends(self, rng):
        a = rng.standard_normal((17, 9))
        b = rng.standard_normal((9, 13))
        got = {
            name: _run_on(name, lambda: np.asarray(get_backend().gemm(a, b)))
            for name in available_backends()
        }
        scale = frob_norm(a) * frob_norm(b)
        assert np.allclose(got["compiled"], got["python"], atol=1e-13 * scale)
        assert np.allclose(got["python"], a @ b, atol=1e-13 * scale)

    def test_right_division_matches_across_backends(self, rng):
        num = rng.standard_normal((8, 8))
        den = rng.standard_normal((8, 8)) + 8.0 * np.eye(8)
        got = {
            name: _run_on(name, lambda: lu_solve_right(num, den, OpCounter()))
            for name in available_backends()
        }
        assert np.allclose(got["compiled"], got["python"], atol=1e-10)
        for x in got.values():
            assert frob_norm(x @ den - num) < 1e-10 * frob_norm(num)

    def test_singular_detection_identical(self):
        num = np.eye(3)
        den = np.diag([1.0, 1.0, 0.0])
        indices = set()
        for name in available_backends():
            with pytest.raises(SingularMatrixError) as exc_info:
                _run_on(name, lambda: lu_solve_right(num, den, OpCounter()))
            indices.add(exc_info.value.pivot_index)
        assert indices == {2}

    def test_matmul_agrees_on_random_squares(self, rng):
        a = rng.standard_normal((12, 12))
        b = rng.standard_normal((12, 12))
        got = {
            name: _run_on(name, lambda: matmul(a, b, OpCounter()))
            for name in available_backends()
        }
        scale = frob_norm(a) * frob_norm(b)
        assert np.allclose(got["compiled"], got["python"], atol=1e-12 * scale)


class TestFullRunAgreement:
    @pytest.mark.parametrize("method", [MethodTag.VARIANT, MethodTag.IN])
    def test_same_counts_and_close_roots(self, rng, method):
        evals = np.linspace(0.3, 1.0, 8)
        q, _ = np.linalg.qr(rng.standard_normal((8, 8)))
        a = (q * evals) @ q.T
        a = 0.5 * (a + a.T)

        outcome = {}
        for name in available_backends():
            counter = OpCounter()
            x, rep = _run_on(
                name, lambda: run(a, 13, method, StoppingRule(), counter)
            )
            outcome[name] = (x, rep, counter.snapshot())

        x_c, rep_c, counts_c = outcome["compiled"]
        x_p, rep_p, counts_p = outcome["python"]
        # who executes the arithmetic must not change what was counted
        assert counts_c == counts_p
        assert rep_c.iterations == rep_p.iterations
        assert rep_c.stop_reason == rep_p.stop_reason
        assert frob_norm(x_c - x_p) < 1e-10 * frob_norm(x_p)
