"""Select the compiled counting kernel when present, else the numpy fallback."""

from __future__ import annotations

import numpy as np

try:
    from . import _stats_core as _impl  # type: ignore[attr-defined]
except ImportError:  # extension not built: pure-Python install
    from . import _stats_py as _impl

BACKEND = _impl.BACKEND


def joint_counts(x, y, order: int, alphabet: int) -> np.ndarray:
    """Counts over (x_t, y_t, x-context, y-context); shape (A, A, A^k, A^k)."""
    xs = np.ascontiguousarray(x, dtype=np.int64)
    ys = np.ascontiguousarray(y, dtype=np.int64)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise ValueError("joint_counts needs two equal-length 1-d arrays")
    if xs.shape[0] <= order:
        raise ValueError("series shorter than the context order")
    return _impl.joint_counts(xs, ys, order, alphabet)
