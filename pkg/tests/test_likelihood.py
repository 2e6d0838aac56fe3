from fractions import Fraction

import pytest

from semicausal.errors import INFINITE, UNDEFINED, InputError
from semicausal.likelihood import (
    curve_points,
    likelihood_ratio,
    ordering_strictly_dominated,
    ratio_ordering,
    roc_dominance_check,
    significance_sensitivity,
)
from semicausal.semimeasure import Semimeasure, iter_words, random_semimeasure

F = Fraction

POINT_MASS_11 = Semimeasure(2, 2, (F(0), F(0), F(0), F(1)))
UNIFORM2 = Semimeasure.uniform(2)


def ratio_stat(P0, PA):
    return lambda y: likelihood_ratio(P0, PA, y)


class TestLikelihoodRatio:
    def test_identity_hypotheses(self):
        P = random_semimeasure(1, 2, strictly_positive=True)
        for y in iter_words(2, 2):
            assert likelihood_ratio(P, P, y) == 1

    def test_point_mass_values(self):
        assert likelihood_ratio(UNIFORM2, POINT_MASS_11, "11") == 4
        assert likelihood_ratio(UNIFORM2, POINT_MASS_11, "00") == 0

    def test_infinite_sentinel(self):
        P0 = Semimeasure(1, 2, (F(0), F(1)))
        PA = Semimeasure(1, 2, (F(1, 2), F(1, 2)))
        assert likelihood_ratio(P0, PA, "0") is INFINITE

    def test_undefined_when_both_vanish(self):
        P0 = Semimeasure(1, 2, (F(0), F(1)))
        PA = Semimeasure(1, 2, (F(0), F(1)))
        assert likelihood_ratio(P0, PA, "0") is UNDEFINED


class TestSignificanceSensitivity:
    def test_constant_statistic_alpha_is_total_null_mass(self):
        P0 = random_semimeasure(5, 2, total=F(3, 4))
        PA = random_semimeasure(6, 2)
        for y in iter_words(2, 2):
            alpha, _ = significance_sensitivity(lambda _: F(1), P0, PA, y)
            assert alpha == F(3, 4)

    def test_point_mass_tails(self):
        d = ratio_stat(UNIFORM2, POINT_MASS_11)
        alpha, _ = significance_sensitivity(d, UNIFORM2, POINT_MASS_11, "11")
        assert alpha == F(1, 4)
        _, beta = significance_sensitivity(d, UNIFORM2, POINT_MASS_11, "00")
        assert beta == 0

    def test_beta_at_argmax_is_total_alternate_mass(self):
        P0 = random_semimeasure(7, 2, strictly_positive=True)
        PA = random_semimeasure(8, 2, strictly_positive=True, total=F(2, 3))
        d = ratio_stat(P0, PA)
        top = max(iter_words(2, 2), key=d)
        _, beta = significance_sensitivity(d, P0, PA, top)
        assert beta == F(2, 3)

    def test_alpha_antitone_beta_monotone_in_statistic(self):
        P0 = random_semimeasure(9, 2, strictly_positive=True)
        PA = random_semimeasure(10, 2, strictly_positive=True)
        d = ratio_stat(P0, PA)
        scored = sorted(iter_words(2, 2), key=d)
        pairs = [significance_sensitivity(d, P0, PA, y) for y in scored]
        for (a1, b1), (a2, b2) in zip(pairs, pairs[1:]):
            assert a1 >= a2
            assert b1 <= b2


class TestRocDominance:
    def test_equal_hypotheses_tie(self):
        assert roc_dominance_check(UNIFORM2, UNIFORM2)

    def test_seeded_generic_pairs(self):
        for seed in range(12):
            P0 = random_semimeasure(seed + 300, 2, strictly_positive=True)
            PA = random_semimeasure(seed + 400, 2, strictly_positive=True)
            assert roc_dominance_check(P0, PA)

    def test_adversarial_ordering_is_dominated(self):
        P0 = random_semimeasure(301, 2, strictly_positive=True)
        PA = random_semimeasure(401, 2, strictly_positive=True)
        worst = list(reversed(ratio_ordering(P0, PA)))
        assert ordering_strictly_dominated(P0, PA, worst)
        best = ratio_ordering(P0, PA)
        assert not ordering_strictly_dominated(P0, PA, best)

    def test_space_too_large(self):
        with pytest.raises(InputError):
            roc_dominance_check(Semimeasure.uniform(4), Semimeasure.uniform(4))

    def test_curve_points_endpoints(self):
        points = curve_points(UNIFORM2, POINT_MASS_11, ratio_ordering(UNIFORM2, POINT_MASS_11))
        assert points[0] == (F(0), F(1))
        assert points[-1] == (F(1), F(0))
