"""The compiled counting kernel and the numpy fallback must agree exactly."""

import numpy as np
import pytest

from semicausal import _stats_py
from semicausal.stats_backend import BACKEND, joint_counts

try:
    from semicausal import _stats_core
except ImportError:
    _stats_core = None


def _series(seed, n, alphabet=2):
    rng = np.random.default_rng(seed)
    return rng.integers(0, alphabet, size=n, dtype=np.int64)


def _brute_counts(x, y, order, alphabet):
    ctx_size = alphabet**order
    counts = np.zeros((alphabet, alphabet, ctx_size, ctx_size), dtype=np.int64)
    for t in range(order, len(x)):
        xc = sum(int(x[t - j]) * alphabet ** (j - 1) for j in range(1, order + 1))
        yc = sum(int(y[t - j]) * alphabet ** (j - 1) for j in range(1, order + 1))
        counts[int(x[t]), int(y[t]), xc, yc] += 1
    return counts


class TestCounts:
    @pytest.mark.parametrize("order", [0, 1, 2, 3])
    @pytest.mark.parametrize("alphabet", [2, 3])
    def test_python_backend_matches_brute_force(self, order, alphabet):
        x = _series(1, 400, alphabet)
        y = _series(2, 400, alphabet)
        got = _stats_py.joint_counts(x, y, order, alphabet)
        assert np.array_equal(got, _brute_counts(x, y, order, alphabet))

    @pytest.mark.skipif(_stats_core is None, reason="compiled kernel not built")
    @pytest.mark.parametrize("order", [0, 1, 2, 3])
    @pytest.mark.parametrize("alphabet", [2, 3])
    def test_compiled_matches_python(self, order, alphabet):
        x = _series(3, 1000, alphabet)
        y = _series(4, 1000, alphabet)
        fast = _stats_core.joint_counts(x, y, order, alphabet)
        slow = _stats_py.joint_counts(x, y, order, alphabet)
        assert np.array_equal(fast, slow)

    def test_dispatch_validates(self):
        with pytest.raises(ValueError):
            joint_counts([0, 1], [0], 1, 2)
        with pytest.raises(ValueError):
            joint_counts([0], [1], 1, 2)

    def test_total_count(self):
        x = _series(5, 256)
        y = _series(6, 256)
        counts = joint_counts(x, y, 2, 2)
        assert counts.sum() == 254

    def test_backend_name_known(self):
        assert BACKEND in ("compiled", "python")
