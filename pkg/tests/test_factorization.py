from fractions import Fraction

import pytest

from semicausal.corpus import (
    independent_uniform,
    instant_copy_bivariate,
    lag1_copy_bivariate,
    random_instantaneous_causal,
    random_positive_bivariate,
)
from semicausal.errors import UNDEFINED, InputError
from semicausal.factorization import (
    CausalKernel,
    Mode,
    Side,
    causal_part,
    equivalence_suite,
    evaluate_kernel,
    factorization_identity,
    influence_free,
    is_causal,
    total_mass_uniformity,
)
from semicausal.semimeasure import (
    BivariateSemimeasure,
    ConditionalSemimeasure,
    Semimeasure,
    iter_words,
    product,
    random_semimeasure,
)

F = Fraction


class TestCausalPart:
    def test_uniform_next_symbol_half(self):
        K = causal_part(independent_uniform(1), Side.X_GIVEN_Y, Mode.CAUSAL)
        assert K.entries[((), ())] == (F(1, 2), F(1, 2))

    def test_independent_product_reduces_to_marginal_ratios(self):
        P = random_semimeasure(21, 2, strictly_positive=True)
        Q = random_semimeasure(22, 2, strictly_positive=True)
        B = product(P, Q)
        K = causal_part(B, Side.X_GIVEN_Y, Mode.CAUSAL)
        for (own, cond), row in K.entries.items():
            base = P.prefix_mass(own)
            expected = tuple(P.prefix_mass(own + (s,)) / base for s in range(2))
            assert row == expected

    def test_lag1_copy_instantaneous_kernel_is_one_on_consistent_pairs(self):
        # oracle: enumerate all 16 pairs of the exact lag-1 process
        B = lag1_copy_bivariate(2)
        K = causal_part(B, Side.Y_GIVEN_X, Mode.INSTANTANEOUS)
        for x in iter_words(2, 2):
            for y in iter_words(2, 2):
                value = evaluate_kernel(K, x, y)
                if y == (0, x[0]):
                    assert value == 1
                else:
                    assert value is UNDEFINED or value == 0

    def test_rows_sum_to_at_most_one(self):
        B = random_positive_bivariate(31, 3)
        for mode in Mode:
            for side in Side:
                K = causal_part(B, side, mode)
                assert all(sum(row) <= 1 for row in K.entries.values())


class TestEvaluateKernel:
    def test_uniform_quarter(self):
        K = causal_part(independent_uniform(2), Side.X_GIVEN_Y, Mode.CAUSAL)
        for x in iter_words(2, 2):
            for y in iter_words(2, 2):
                assert evaluate_kernel(K, x, y) == F(1, 4)

    def test_depth_zero_empty_product(self):
        K = causal_part(BivariateSemimeasure.uniform(0), Side.X_GIVEN_Y, Mode.CAUSAL)
        assert evaluate_kernel(K, "", "") == 1

    def test_matches_telescoping_quotient_oracle(self):
        B = random_positive_bivariate(41, 3)
        K = causal_part(B, Side.X_GIVEN_Y, Mode.CAUSAL)
        for x in iter_words(3, 2):
            for y in iter_words(3, 2):
                want = F(1)
                for i in range(1, 4):
                    want *= B.prefix_pair_mass(x[:i], y[: i - 1]) / B.prefix_pair_mass(
                        x[: i - 1], y[: i - 1]
                    )
                assert evaluate_kernel(K, x, y) == want

    def test_length_mismatch(self):
        K = causal_part(independent_uniform(2), Side.X_GIVEN_Y, Mode.CAUSAL)
        with pytest.raises(InputError):
            evaluate_kernel(K, "0", "01")


class TestFactorizationIdentity:
    def test_uniform_depth_one(self):
        assert factorization_identity(independent_uniform(1)) == (True, None)

    def test_deficient_uniform(self):
        B = BivariateSemimeasure(1, 2, (F(1, 8),) * 4)
        assert factorization_identity(B) == (True, None)

    def test_seeded_positive_all_64_pairs(self):
        holds, witness = factorization_identity(random_positive_bivariate(51, 3))
        assert holds and witness is None

    def test_depth_zero(self):
        holds, witness = factorization_identity(BivariateSemimeasure.uniform(0, total=F(1, 3)))
        assert holds and witness is None


class TestIsCausal:
    def test_kernel_built_conditional_is_causal(self):
        B = random_instantaneous_causal(3, 2)
        cond = B.conditional_y_given_x()
        assert is_causal(cond, Mode.INSTANTANEOUS)

    def test_strict_kernel_built_conditional(self):
        # multiply out a proper strict-causal kernel q(y_i | y^{i-1}, x^{i-1})
        import random as pyrandom

        rng = pyrandom.Random("strict-kernel")
        rows = {}
        for i in range(1, 3):
            for y_past in iter_words(i - 1, 2):
                for x_past in iter_words(i - 1, 2):
                    a = F(rng.randint(1, 9), 10)
                    rows[(y_past, x_past)] = (a, 1 - a)
        kernel = {}
        for x in iter_words(2, 2):
            leaves = []
            for y in iter_words(2, 2):
                value = F(1)
                for i in range(1, 3):
                    value *= rows[(y[: i - 1], x[: i - 1])][y[i - 1]]
                leaves.append(value)
            kernel[x] = Semimeasure(2, 2, tuple(leaves))
        cond = ConditionalSemimeasure(2, 2, kernel)
        assert is_causal(cond, Mode.CAUSAL)
        assert is_causal(cond, Mode.INSTANTANEOUS)  # strict-causal is also instantaneous

    def test_instant_copy_modes(self):
        cond = instant_copy_bivariate(2).conditional_y_given_x()
        assert is_causal(cond, Mode.INSTANTANEOUS)
        assert not is_causal(cond, Mode.CAUSAL)

    def test_future_dependence_fails_both_modes(self):
        # x_1's conditional mass depends on y_2
        def mass(x, y):
            p = F(3, 4) if y[1] == 0 else F(1, 4)
            base = p if x[0] == 0 else 1 - p
            return base * F(1, 2) * F(1, 4)

        B = BivariateSemimeasure.from_function(2, mass)
        cond = B.conditional_x_given_y()
        assert not is_causal(cond, Mode.CAUSAL)
        assert not is_causal(cond, Mode.INSTANTANEOUS)


class TestEquivalenceSuite:
    def test_constructed_all_true(self):
        report = equivalence_suite(random_instantaneous_causal(7, 3))
        assert report.as_tuple() == (True,) * 5

    def test_uniform_all_true(self):
        assert equivalence_suite(independent_uniform(2)).as_tuple() == (True,) * 5

    def test_generic_all_false_but_agreeing(self):
        report = equivalence_suite(random_positive_bivariate(71, 3))
        assert report.as_tuple() == (False,) * 5


class TestInfluenceFree:
    def test_independent_product(self):
        P = random_semimeasure(81, 2, strictly_positive=True)
        Q = random_semimeasure(82, 2, strictly_positive=True)
        assert influence_free(product(P, Q))

    def test_instant_copy_x_free_of_y(self):
        # y mirrors x instantly, but y's past never feeds x (checked exhaustively)
        for depth in (1, 2, 3):
            assert influence_free(instant_copy_bivariate(depth))

    def test_lag1_feedback_not_free(self):
        # swapped lag-1 copy: x repeats y's previous symbol
        assert not influence_free(lag1_copy_bivariate(2).swapped())


class TestSwapIdentity:
    def test_products_agree_on_positive_corpus(self):
        for seed in range(6):
            B = random_positive_bivariate(seed + 90, 3)
            cx = causal_part(B, Side.X_GIVEN_Y, Mode.CAUSAL)
            ix = causal_part(B, Side.X_GIVEN_Y, Mode.INSTANTANEOUS)
            cy = causal_part(B, Side.Y_GIVEN_X, Mode.CAUSAL)
            iy = causal_part(B, Side.Y_GIVEN_X, Mode.INSTANTANEOUS)
            root = B.prefix_pair_mass((), ())
            for x in iter_words(3, 2):
                for y in iter_words(3, 2):
                    left = evaluate_kernel(cx, x, y) * evaluate_kernel(iy, x, y)
                    right = evaluate_kernel(ix, x, y) * evaluate_kernel(cy, x, y)
                    assert left == right == B.pair_mass(x, y) / root


class TestTotalMassUniformity:
    def test_proper_conditional_uniform(self):
        cond = random_positive_bivariate(95, 2).conditional_x_given_y()
        report = total_mass_uniformity(cond)
        assert report.uniform and not report.gap_conditions

    def test_nonuniform_totals(self):
        full = Semimeasure.uniform(1)
        half = Semimeasure.uniform(1, total=F(1, 2))
        cond = ConditionalSemimeasure(1, 2, {(0,): full, (1,): half})
        assert not total_mass_uniformity(cond).uniform

    def test_gaps_counted_as_zero_and_flagged(self):
        cond = ConditionalSemimeasure(1, 2, {(0,): Semimeasure.uniform(1)})
        report = total_mass_uniformity(cond)
        assert not report.uniform
        assert report.gap_conditions == ((1,),)


class TestKernelSerialization:
    def test_json_roundtrip(self):
        B = random_positive_bivariate(99, 2)
        K = causal_part(B, Side.Y_GIVEN_X, Mode.INSTANTANEOUS)
        doc = K.to_json_dict()
        assert doc["mode"] == "instantaneous"
        K2 = CausalKernel.from_json_dict(doc)
        assert K2.entries == dict(K.entries)
        assert K2.undefined == K.undefined

    def test_undefined_contexts_listed(self):
        B = BivariateSemimeasure(1, 2, (F(1, 2), F(1, 2), F(0), F(0)))
        K = causal_part(B, Side.Y_GIVEN_X, Mode.INSTANTANEOUS)
        doc = K.to_json_dict()
        assert ":1" in doc["undefined_contexts"]
