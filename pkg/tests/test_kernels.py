"""Backend parity: the compiled kernels and the pure-Python fallback must
produce bit-identical results, not merely close ones, so golden files do not
depend on which backend happens to be installed."""

import numpy as np
import pytest

from motrack import _kernels
from motrack._kernels import _pyfallback

native = pytest.importorskip(
    "motrack._kernels._native", reason="compiled kernel extension not built"
)


def random_spd_chol(rng, n):
    a = rng.standard_normal((n, 4, 4))
    spd = a @ a.transpose(0, 2, 1) + 2.0 * np.eye(4)
    return np.linalg.cholesky(spd)


class TestBackendSelection:
    def test_names(self):
        assert set(_kernels.available_backends()) <= {"native", "python"}
        assert _kernels.backend_name() in _kernels.available_backends()

    def test_switch_and_restore(self):
        original = _kernels.backend_name()
        try:
            _kernels.use_backend("python")
            assert _kernels.backend_name() == "python"
            _kernels.use_backend("native")
            assert _kernels.backend_name() == "native"
        finally:
            _kernels.use_backend(original)

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            _kernels.use_backend("gpu")


class TestSolveLapParity:
    def test_bitwise_identical_on_random_matrices(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n, m = rng.integers(1, 12, size=2)
            cost = rng.uniform(0.0, 100.0, size=(n, m))
            if n > m:
                cost = np.ascontiguousarray(cost[:m])
            got_n = native.solve_lap(cost)
            got_p = _pyfallback.solve_lap(cost)
            for a, b in zip(got_n, got_p):
                assert np.array_equal(np.asarray(a), np.asarray(b))

    def test_sentinel_heavy(self):
        rng = np.random.default_rng(8)
        cost = np.full((9, 9), 1e5)
        idx = rng.permutation(9)
        cost[np.arange(9), idx] = rng.uniform(0, 1, 9)
        got_n = native.solve_lap(cost)
        got_p = _pyfallback.solve_lap(cost)
        for a, b in zip(got_n, got_p):
            assert np.array_equal(np.asarray(a), np.asarray(b))
        assert np.array_equal(got_n[0], idx)


class TestPairwiseIouParity:
    def test_bitwise_identical(self):
        rng = np.random.default_rng(9)
        a = np.column_stack(
            [rng.uniform(0, 50, 40), rng.uniform(0, 50, 40),
             rng.uniform(1, 30, 40), rng.uniform(1, 30, 40)]
        )
        b = np.column_stack(
            [rng.uniform(0, 50, 25), rng.uniform(0, 50, 25),
             rng.uniform(1, 30, 25), rng.uniform(1, 30, 25)]
        )
        got_n = native.pairwise_iou(a, b)
        got_p = _pyfallback.pairwise_iou(a, b)
        assert got_n.shape == (40, 25)
        assert np.array_equal(got_n, got_p)

    def test_matches_scalar_iou(self):
        from motrack import BoundingBox, iou

        rng = np.random.default_rng(10)
        rows = rng.uniform([0, 0, 1, 1], [50, 50, 30, 30], size=(12, 4))
        grid = _kernels.pairwise_iou(rows, rows)
        for i in range(12):
            for j in range(12):
                scalar = iou(BoundingBox(*rows[i]), BoundingBox(*rows[j]))
                assert grid[i, j] == pytest.approx(scalar, abs=1e-12)

    def test_disjoint_is_zero(self):
        a = np.array([[0.0, 0.0, 5.0, 5.0]])
        b = np.array([[100.0, 100.0, 5.0, 5.0]])
        assert _kernels.pairwise_iou(a, b)[0, 0] == 0.0


class TestMahalanobisParity:
    def test_bitwise_identical(self):
        rng = np.random.default_rng(11)
        chol = random_spd_chol(rng, 6)
        means = rng.uniform(-50, 50, size=(6, 4))
        points = rng.uniform(-50, 50, size=(20, 4))
        got_n = native.mahalanobis_batch(chol, means, points)
        got_p = _pyfallback.mahalanobis_batch(chol, means, points)
        assert got_n.shape == (6, 20)
        assert np.array_equal(got_n, got_p)

    def test_matches_direct_quadratic_form(self):
        rng = np.random.default_rng(12)
        chol = random_spd_chol(rng, 3)
        means = rng.uniform(-10, 10, size=(3, 4))
        points = rng.uniform(-10, 10, size=(8, 4))
        got = _kernels.mahalanobis_batch(chol, means, points)
        for t in range(3):
            s = chol[t] @ chol[t].T
            for i in range(8):
                delta = points[i] - means[t]
                expected = delta @ np.linalg.solve(s, delta)
                assert got[t, i] == pytest.approx(expected, rel=1e-9)

    def test_zero_at_mean(self):
        rng = np.random.default_rng(13)
        chol = random_spd_chol(rng, 2)
        means = rng.uniform(-10, 10, size=(2, 4))
        got = _kernels.mahalanobis_batch(chol, means, means)
        assert got[0, 0] == 0.0 and got[1, 1] == 0.0
