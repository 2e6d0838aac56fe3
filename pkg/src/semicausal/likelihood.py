"""Likelihood-ratio statistics, exact tail significances, and ROC optimality.

For simple hypotheses P0 (null) and PA (alternate), the one-sided statistic
d(x) = PA(x)/P0(x) has significance and sensitivity

    alpha(x) = sum { P0(y) : d(y) >= d(x) }
    beta(x)  = sum { PA(y) : d(y) <= d(x) }

computed here as exact tail sums over the finite outcome space. The ratio
ordering's ROC curve (beta as a function of alpha, linearly interpolated:
interpolation is what randomized tie-breaking achieves) is uniformly at
least as good as any other outcome ordering's; `roc_dominance_check`
verifies that by brute force over all orderings, in exact arithmetic.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Sequence

from .errors import INFINITE, UNDEFINED, InputError
from .semimeasure import Semimeasure, Word, iter_words

ZERO = Fraction(0)


def likelihood_ratio(P0: Semimeasure, PA: Semimeasure, x):
    """d(x) = PA(x) / P0(x), exact; INFINITE when only the null mass vanishes."""
    null = P0.leaf(x)
    alt = PA.leaf(x)
    if null == 0:
        return UNDEFINED if alt == 0 else INFINITE
    return alt / null


def _rank(value) -> tuple[int, Fraction]:
    # totally order Fractions below the INFINITE sentinel
    if value is INFINITE:
        return (1, ZERO)
    return (0, value)


def significance_sensitivity(d: Callable, P0: Semimeasure, PA: Semimeasure, x):
    """Exact (alpha, beta) tail sums of the statistic d at outcome x.

    Outcomes where d is UNDEFINED carry no mass under either hypothesis by
    construction of the ratio statistic and are skipped.
    """
    here = d(x)
    if here is UNDEFINED:
        raise InputError("statistic undefined at the observed outcome")
    alpha = ZERO
    beta = ZERO
    for y in iter_words(P0.depth, P0.alphabet_size):
        dy = d(y)
        if dy is UNDEFINED:
            continue
        if _rank(dy) >= _rank(here):
            alpha += P0.leaf(y)
        if _rank(dy) <= _rank(here):
            beta += PA.leaf(y)
    return alpha, beta


def curve_points(P0: Semimeasure, PA: Semimeasure, ordering: Sequence[Word]):
    """Operating points (alpha_k, beta_k) when rejecting the first k outcomes."""
    total_alt = sum((PA.leaf(y) for y in ordering), ZERO)
    points = [(ZERO, total_alt)]
    alpha = ZERO
    beta = total_alt
    for y in ordering:
        alpha += P0.leaf(y)
        beta -= PA.leaf(y)
        points.append((alpha, beta))
    return points


def ratio_ordering(P0: Semimeasure, PA: Semimeasure) -> list[Word]:
    """Outcomes sorted by decreasing likelihood ratio (ties kept deterministic)."""
    def key(y: Word):
        d = likelihood_ratio(P0, PA, y)
        if d is UNDEFINED:
            return (-1, ZERO)
        return _rank(d)

    return sorted(iter_words(P0.depth, P0.alphabet_size), key=key, reverse=True)


def _envelope_at(points: Sequence[tuple[Fraction, Fraction]], alpha: Fraction) -> Fraction:
    """Exact interpolated beta of a rejection curve at significance alpha.

    Outcomes tied in ratio have collinear segments, so interpolation over any
    fixed tie-break realizes every randomized tie-split of the ratio test.
    """
    best = None
    for (a0, b0), (a1, b1) in zip(points, points[1:]):
        if a0 == a1:
            candidates = (b0, b1) if a0 == alpha else ()
        elif a0 <= alpha <= a1:
            candidates = (b0 + (b1 - b0) * (alpha - a0) / (a1 - a0),)
        else:
            candidates = ()
        for b in candidates:
            if best is None or b < best:
                best = b
    if best is None:
        # beyond the curve's alpha range: clamp to the nearer endpoint
        best = points[0][1] if alpha < points[0][0] else points[-1][1]
    return best


def roc_dominance_check(P0: Semimeasure, PA: Semimeasure, max_outcomes: int = 8) -> bool:
    """True iff no total outcome ordering achieves a strictly better trade-off.

    Exhaustive over all orderings of the outcome space (hence the size cap):
    every operating point of every ordering must lie on or above the ratio
    ordering's interpolated curve.
    """
    if P0.depth != PA.depth or P0.alphabet_size != PA.alphabet_size:
        raise InputError("hypotheses must share an outcome space")
    outcomes = list(iter_words(P0.depth, P0.alphabet_size))
    if len(outcomes) > max_outcomes:
        raise InputError(f"outcome space of size {len(outcomes)} is too large to brute-force")
    lr_points = curve_points(P0, PA, ratio_ordering(P0, PA))
    for ordering in itertools.permutations(outcomes):
        for alpha, beta in curve_points(P0, PA, ordering):
            if _envelope_at(lr_points, alpha) > beta:
                return False
    return True


def ordering_strictly_dominated(P0: Semimeasure, PA: Semimeasure, ordering: Sequence[Word]) -> bool:
    """True iff the ratio curve is strictly better at one of the ordering's points."""
    lr_points = curve_points(P0, PA, ratio_ordering(P0, PA))
    return any(
        _envelope_at(lr_points, alpha) < beta
        for alpha, beta in curve_points(P0, PA, ordering)
    )
