"""Pure-numpy fallback for the hot counting kernel.

Both backends return the same integer tensor: counts over
(x_t, y_t, x-context code, y-context code) for t = k..n-1, where a context
code packs the last k symbols with the most recent symbol in the lowest
digit. Keeping the statistics themselves out of the backends guarantees the
two implementations agree bit for bit.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def joint_counts(x: np.ndarray, y: np.ndarray, order: int, alphabet: int) -> np.ndarray:
    n = x.shape[0]
    ctx_size = alphabet**order
    x_ctx = np.zeros(n - order, dtype=np.int64)
    y_ctx = np.zeros(n - order, dtype=np.int64)
    for j in range(1, order + 1):
        scale = alphabet ** (j - 1)
        x_ctx += x[order - j : n - j] * scale
        y_ctx += y[order - j : n - j] * scale
    codes = ((x[order:] * alphabet + y[order:]) * ctx_size + x_ctx) * ctx_size + y_ctx
    flat = np.bincount(codes, minlength=alphabet * alphabet * ctx_size * ctx_size)
    return flat.reshape(alphabet, alphabet, ctx_size, ctx_size)
