"""Shannon information transfer, Granger baseline, and permutation significance.

Two layers live here. The exact layer computes the expected log-ratio
statistics of a dense bivariate semimeasure,

    SI        = sum P(x,y) log P(x,y) / (P(x) P(y))
    SIT_xy    = sum P(x,y) log P(x|y^) / P(x)
    SIT_yx    = sum P(x,y) log P(y|x^) / P(y)
    SIT_inst  = sum P(x,y) log P(x,y) / (P(x|y^) P(y|x^))

with 0 log 0 := 0 and SI = SIT_xy + SIT_yx + SIT_inst, verified on the
rational log arguments pointwise. The estimation layer fits per-step
plug-in models of a fixed Markov order to observed series and reports the
per-step analogues (transfer entropies, an instantaneous term, and their
exact per-step total), plus a mean-squared-error Granger statistic and a
permutation test for significance.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputError
from .influence import log2_fraction
from .mixture import staircase_from_bivariate
from .semimeasure import BivariateSemimeasure, iter_words
from .stats_backend import joint_counts

THREADS_ENV = "SEMICAUSAL_THREADS"


# ---------------------------------------------------------------------------
# exact statistics of a finite bivariate semimeasure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShannonDecomposition:
    si: float
    sit_xy: float
    sit_yx: float
    sit_inst: float
    exact_identity: bool
    deficiency_warning: bool

    def terms(self) -> dict[str, float]:
        return {"I": self.si, "T_xy": self.sit_xy, "T_yx": self.sit_yx, "T_inst": self.sit_inst}


def shannon_sit(P: BivariateSemimeasure) -> ShannonDecomposition:
    """Exact expectation statistics of P; flags deficiency when total mass < 1."""
    si = sit_xy = sit_yx = sit_inst = 0.0
    identity = True
    for x in iter_words(P.depth, P.alphabet_size):
        for y in iter_words(P.depth, P.alphabet_size):
            w = P.pair_mass(x, y)
            if w == 0:
                continue
            st = staircase_from_bivariate(P, x, y)
            xy_causal = st.causal_x_given_y()
            yx_causal = st.causal_y_given_x()
            mi_arg = w / (st.marginal_x * st.marginal_y)
            xy_arg = xy_causal / st.marginal_x
            yx_arg = yx_causal / st.marginal_y
            inst_arg = w / (xy_causal * yx_causal)
            if mi_arg != xy_arg * yx_arg * inst_arg:
                identity = False
            wf = float(w)
            si += wf * log2_fraction(mi_arg)
            sit_xy += wf * log2_fraction(xy_arg)
            sit_yx += wf * log2_fraction(yx_arg)
            sit_inst += wf * log2_fraction(inst_arg)
    return ShannonDecomposition(
        si, sit_xy, sit_yx, sit_inst,
        exact_identity=identity,
        deficiency_warning=P.total() < 1,
    )


# ---------------------------------------------------------------------------
# plug-in estimation from observed series
# ---------------------------------------------------------------------------

def _entropy(counts: np.ndarray) -> float:
    total = int(counts.sum())
    if total == 0:
        return 0.0
    nz = counts[counts > 0].astype(np.float64)
    return math.log2(total) - float((nz * np.log2(nz)).sum()) / total


@dataclass(frozen=True)
class PluginTransfer:
    """Per-step plug-in statistics at a fixed Markov order.

    si is I((X_t, Xctx); (Y_t, Yctx)) - I(Xctx; Yctx); the three transfer
    terms sum to it exactly (up to float rounding), mirroring the exact
    sequence-level identity.
    """

    si: float
    sit_xy: float
    sit_yx: float
    sit_inst: float
    order: int
    samples: int

    def terms(self) -> dict[str, float]:
        return {"I": self.si, "T_xy": self.sit_xy, "T_yx": self.sit_yx, "T_inst": self.sit_inst}


def plugin_transfer(x, y, order: int = 1, alphabet: int = 2) -> PluginTransfer:
    """Fit order-k plug-in models and return the per-step transfer statistics."""
    if order < 0:
        raise InputError("order must be nonnegative")
    counts = joint_counts(x, y, order, alphabet)  # (x_t, y_t, xctx, yctx)
    h_xc = _entropy(counts.sum(axis=(0, 1, 3)))
    h_yc = _entropy(counts.sum(axis=(0, 1, 2)))
    h_cc = _entropy(counts.sum(axis=(0, 1)))
    h_xt_xc = _entropy(counts.sum(axis=(1, 3)))
    h_yt_yc = _entropy(counts.sum(axis=(0, 2)))
    h_xt_cc = _entropy(counts.sum(axis=1))
    h_yt_cc = _entropy(counts.sum(axis=0))
    h_all = _entropy(counts)
    sit_yx = h_yt_yc + h_cc - h_yt_cc - h_yc  # I(Y_t; Xctx | Yctx)
    sit_xy = h_xt_xc + h_cc - h_xt_cc - h_xc  # I(X_t; Yctx | Xctx)
    sit_inst = h_xt_cc + h_yt_cc - h_all - h_cc  # I(X_t; Y_t | Xctx, Yctx)
    si = h_xt_xc + h_yt_yc + h_cc - h_xc - h_yc - h_all
    samples = int(counts.sum())
    return PluginTransfer(si, sit_xy, sit_yx, sit_inst, order, samples)


@dataclass(frozen=True)
class GrangerResult:
    value: float
    rank_deficient: bool


def granger_statistic(x, y, order: int = 1) -> GrangerResult:
    """MSE drop when y's past joins x's own past in a least-squares one-step predictor.

    In-sample fit on the full series; a rank-deficient design (constant
    series) yields statistic 0 with the flag set.
    """
    if order < 1:
        raise InputError("predictor order must be at least 1")
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    n = xs.shape[0]
    if n <= order + 1:
        raise InputError("series too short for the requested order")
    target = xs[order:]
    ones = np.ones(n - order)
    self_cols = [ones] + [xs[order - j : n - j] for j in range(1, order + 1)]
    joint_cols = self_cols + [ys[order - j : n - j] for j in range(1, order + 1)]

    def fit(cols):
        design = np.column_stack(cols)
        coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
        resid = target - design @ coef
        return float(resid @ resid) / resid.shape[0], rank < design.shape[1]

    mse_self, bad_self = fit(self_cols)
    mse_joint, bad_joint = fit(joint_cols)
    if bad_self or bad_joint:
        return GrangerResult(0.0, True)
    return GrangerResult(mse_self - mse_joint, False)


# ---------------------------------------------------------------------------
# permutation significance
# ---------------------------------------------------------------------------

def _stat_sit_yx(x, y, order, alphabet):
    return plugin_transfer(x, y, order, alphabet).sit_yx


def _stat_sit_xy(x, y, order, alphabet):
    return plugin_transfer(x, y, order, alphabet).sit_xy


def _stat_sit_inst(x, y, order, alphabet):
    return plugin_transfer(x, y, order, alphabet).sit_inst


def _stat_granger_yx(x, y, order, alphabet):
    return granger_statistic(x, y, order).value


def _stat_granger_xy(x, y, order, alphabet):
    return granger_statistic(y, x, order).value


STATISTICS: dict[str, Callable] = {
    "sit_yx": _stat_sit_yx,
    "sit_xy": _stat_sit_xy,
    "sit_inst": _stat_sit_inst,
    "granger_yx": _stat_granger_yx,
    "granger_xy": _stat_granger_xy,
}


@dataclass(frozen=True)
class PermutationResult:
    statistic: str
    observed: float
    p_value: float
    trials: int
    seed: int
    scheme: str


def _thread_count(trials: int) -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        cap = max(1, int(raw))
    except ValueError:
        cap = 1
    return min(cap, trials) if trials else 1


def permutation_test(
    statistic: str | Callable,
    x: Sequence[int],
    y: Sequence[int],
    trials: int,
    seed: int = 0,
    scheme: str = "shuffle",
    order: int = 1,
    alphabet: int = 2,
) -> PermutationResult:
    """p = (1 + #{permuted statistic >= observed}) / (trials + 1).

    The default scheme reshuffles y uniformly; the shift scheme rotates y by
    a random offset, preserving its short-range autocorrelation. Permuted
    series are drawn up front from the seed, so the p-value is invariant to
    trial execution order (and to the thread cap).
    """
    if trials < 1:
        raise InputError("permutation test needs at least one trial")
    if scheme not in ("shuffle", "shift"):
        raise InputError(f"unknown permutation scheme {scheme!r}")
    if callable(statistic):
        stat_fn = statistic
        stat_name = getattr(statistic, "__name__", "custom")
    else:
        try:
            stat_fn = STATISTICS[statistic]
        except KeyError:
            raise InputError(f"unknown statistic {statistic!r}") from None
        stat_name = statistic
    xs = np.asarray(x, dtype=np.int64)
    ys = np.asarray(y, dtype=np.int64)
    observed = stat_fn(xs, ys, order, alphabet)
    rng = np.random.default_rng(seed)
    if scheme == "shuffle":
        permuted = [rng.permutation(ys) for _ in range(trials)]
    else:
        offsets = rng.integers(1, ys.shape[0], size=trials)
        permuted = [np.roll(ys, int(off)) for off in offsets]
    workers = _thread_count(trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda p: stat_fn(xs, p, order, alphabet), permuted))
    else:
        values = [stat_fn(xs, p, order, alphabet) for p in permuted]
    exceed = sum(1 for v in values if v >= observed)
    return PermutationResult(
        statistic=stat_name,
        observed=observed,
        p_value=(1 + exceed) / (trials + 1),
        trials=trials,
        seed=seed,
        scheme=scheme,
    )
