"""Seeded exact fixtures shared by the self-test suites and the test corpus."""

from __future__ import annotations

import random
from fractions import Fraction

from .semimeasure import (
    BivariateSemimeasure,
    Semimeasure,
    iter_words,
    product,
    random_bivariate,
    random_semimeasure,
    word_index,
)

ZERO = Fraction(0)
ONE = Fraction(1)


def independent_uniform(depth: int) -> BivariateSemimeasure:
    return product(Semimeasure.uniform(depth), Semimeasure.uniform(depth))


def instant_copy_bivariate(depth: int) -> BivariateSemimeasure:
    """x iid fair, y = x symbol for symbol."""
    scale = Fraction(1, 2**depth)
    return BivariateSemimeasure.from_function(
        depth, lambda x, y: scale if x == y else ZERO
    )


def lag1_copy_bivariate(depth: int) -> BivariateSemimeasure:
    """x iid fair; y starts at 0 and repeats x's previous symbol."""
    scale = Fraction(1, 2**depth)

    def mass(x, y):
        ok = y[0] == 0 and all(y[i] == x[i - 1] for i in range(1, depth))
        return scale if ok else ZERO

    return BivariateSemimeasure.from_function(depth, mass)


def random_positive_bivariate(seed: int, depth: int) -> BivariateSemimeasure:
    return random_bivariate(seed, depth, strictly_positive=True)


def random_positive_semimeasure(seed: int, depth: int) -> Semimeasure:
    return random_semimeasure(seed, depth, strictly_positive=True)


def _positive_row(rng: random.Random, width: int) -> tuple[Fraction, ...]:
    weights = [rng.randint(1, 16) for _ in range(width)]
    total = sum(weights)
    return tuple(Fraction(w, total) for w in weights)


def random_instantaneous_causal(seed: int, depth: int, alphabet_size: int = 2) -> BivariateSemimeasure:
    """P(x, y) = Q(x) * prod_i q(y_i | y^{i-1}, x^i) with positive proper rows.

    By construction y's conditional is instantaneous causal and x is
    influence-free of y, so all five equivalence-suite predicates are true.
    """
    rng = random.Random(f"instcausal|{seed}|{depth}|{alphabet_size}")
    marginal = random_semimeasure(seed * 7919 + 13, depth, alphabet_size, strictly_positive=True)
    rows: dict[tuple, tuple[Fraction, ...]] = {}
    for i in range(1, depth + 1):
        for y_past in iter_words(i - 1, alphabet_size):
            for x_pref in iter_words(i, alphabet_size):
                rows[(y_past, x_pref)] = _positive_row(rng, alphabet_size)

    size = alphabet_size**depth
    masses = [ZERO] * (size * size)
    for x in iter_words(depth, alphabet_size):
        qx = marginal.leaf(x)
        for y in iter_words(depth, alphabet_size):
            value = qx
            for i in range(1, depth + 1):
                value *= rows[(y[: i - 1], x[:i])][y[i - 1]]
            masses[word_index(x, alphabet_size) * size + word_index(y, alphabet_size)] = value
    return BivariateSemimeasure(depth, alphabet_size, tuple(masses))
