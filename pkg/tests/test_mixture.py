from fractions import Fraction

import pytest

from semicausal.errors import FamilySizeError, InputError
from semicausal.mixture import (
    BivariateMixture,
    MixtureModel,
    ProductMixture,
    Wiring,
    build_mixture,
    depth_restriction,
    dyadic_weights,
    grid_rows,
    ilog2_weights,
    markov_family,
    pair_family,
    staged_enumeration,
    staircase_from_bivariate,
)
from semicausal.semimeasure import (
    BivariateSemimeasure,
    Semimeasure,
    iter_words,
    random_semimeasure,
    word_index,
)

F = Fraction


class TestWeights:
    def test_dyadic(self):
        assert dyadic_weights(3) == (F(1, 2), F(1, 4), F(1, 8))

    def test_ilog2_matches_summation_oracle(self):
        # recompute the normalizer by direct summation, as the builder must
        count = 7
        raw = [F(1, (i + 1) * max(1, (i + 1).bit_length() - 1) ** 2) for i in range(1, count + 1)]
        scale = F(1) / sum(raw)
        assert ilog2_weights(count) == tuple(r * scale for r in raw)
        assert sum(ilog2_weights(count)) == 1

    def test_ilog2_first_term(self):
        # i=1: a_1 proportional to 1/((2) * 1^2)
        weights = ilog2_weights(3)
        assert weights[0] * 2 == weights[0] / F(1, 2)


class TestBuildMixture:
    def test_two_components_dyadic(self):
        P1 = random_semimeasure(1, 2)
        P2 = random_semimeasure(2, 2)
        m = build_mixture([P1, P2], scheme="dyadic")
        for w in iter_words(2, 2):
            assert m.mass(w) == P1.leaf(w) / 2 + P2.leaf(w) / 4

    def test_single_component_explicit_weight(self):
        P = random_semimeasure(3, 2)
        m = build_mixture([P], weights=[F(1, 3)])
        for w in iter_words(2, 2):
            assert m.mass(w) == P.leaf(w) / 3

    def test_empty_family_rejected(self):
        with pytest.raises(InputError):
            build_mixture([])

    def test_dominance_certificate(self):
        comps = [random_semimeasure(s, 2) for s in range(6)]
        m = build_mixture(comps, scheme="ilog2")
        assert m.dominates_components()
        dense = m.dense()
        for w, comp in zip(m.weights, comps):
            for word in iter_words(2, 2):
                assert dense.leaf(word) >= w * comp.leaf(word)

    def test_mixture_is_semimeasure(self):
        comps = [random_semimeasure(s + 10, 2) for s in range(5)]
        dense = build_mixture(comps, scheme="dyadic").dense()
        assert dense.total() <= 1


class TestProductMixture:
    def test_uniform_singletons(self):
        m_x = build_mixture([Semimeasure.uniform(1)], weights=[F(1)])
        m_y = build_mixture([Semimeasure.uniform(1)], weights=[F(1)])
        pm = ProductMixture(m_x, m_y)
        for x in iter_words(1, 2):
            for y in iter_words(1, 2):
                assert pm.pair_mass(x, y) == F(1, 4)

    def test_dominance_all_pairs(self):
        m_x = build_mixture([random_semimeasure(s, 2) for s in range(3)])
        m_y = build_mixture([random_semimeasure(s + 5, 2) for s in range(3)])
        pm = ProductMixture(m_x, m_y)
        for x in iter_words(2, 2):
            for y in iter_words(2, 2):
                assert pm.dominates(x, y)

    def test_expansion_oracle(self):
        comps_x = [random_semimeasure(s, 2) for s in (31, 32)]
        comps_y = [random_semimeasure(s, 2) for s in (33, 34)]
        m_x = build_mixture(comps_x, weights=[F(1, 2), F(1, 4)])
        m_y = build_mixture(comps_y, weights=[F(1, 3), F(1, 5)])
        pm = ProductMixture(m_x, m_y)
        for x in iter_words(2, 2):
            for y in iter_words(2, 2):
                expanded = sum(
                    a * b * P.leaf(x) * Q.leaf(y)
                    for a, P in zip(m_x.weights, comps_x)
                    for b, Q in zip(m_y.weights, comps_y)
                )
                assert pm.pair_mass(x, y) == expanded

    def test_depth_mismatch(self):
        with pytest.raises(InputError):
            ProductMixture(
                build_mixture([Semimeasure.uniform(1)]),
                build_mixture([Semimeasure.uniform(2)]),
            )


def _table_stream(tables):
    def stream(t):
        return tables[min(t, len(tables) - 1)]

    return stream


class TestStagedEnumeration:
    def _ok(self, table):
        return True

    def test_predicate_violation_freezes(self):
        low = (F(1, 8),) * 4  # total 1/2
        high = (F(1, 4),) * 4  # total 1: violates L below

        def L(sm):
            return sm.total() <= F(1, 2)

        stream = _table_stream([(F(0),) * 4, low, low, high, high, high])
        history = staged_enumeration([stream], L, t_max=6, depth=2)
        # t=3 onward the candidate violates L, so the t=2 table persists
        assert history[2][0].leaf_mass == low
        for t in range(3, 7):
            assert history[t][0].leaf_mass == low

    def test_mass_above_one_freezes_at_zero(self):
        bad = (F(1, 2),) * 4  # total mass 2
        stream = _table_stream([bad])
        history = staged_enumeration([stream], self._ok, t_max=3, depth=2)
        for t in range(4):
            assert all(m == 0 for m in history[t][0].leaf_mass)

    def test_all_valid_streams_replay(self):
        tables = [
            (F(0),) * 4,
            (F(1, 8),) * 4,
            (F(1, 8), F(1, 4), F(1, 8), F(1, 8)),
            (F(1, 4),) * 4,
        ]
        stream = _table_stream(tables)
        history = staged_enumeration([stream], self._ok, t_max=5, depth=2)
        for t in range(1, 6):
            assert history[t][0].leaf_mass == tables[min(t, 3)]

    def test_output_monotone_and_predicate_holds(self):
        def L(sm):
            return sm.total() <= F(3, 4)

        tables = [
            (F(0),) * 4,
            (F(1, 16),) * 4,
            (F(1, 8),) * 4,
            (F(3, 16),) * 4,
            (F(1, 4),) * 4,  # total 1 > 3/4: frozen
        ]
        history = staged_enumeration([_table_stream(tables)], L, t_max=8, depth=2)
        for earlier, later in zip(history, history[1:]):
            for a, b in zip(earlier[0].leaf_mass, later[0].leaf_mass):
                assert a <= b
        for stage in history:
            assert L(stage[0])
            assert L(depth_restriction(stage[0], 1))

    def test_index_cutoff_polls_late_streams_late(self):
        quarter = (F(1, 4),) * 4
        streams = [_table_stream([quarter]), _table_stream([quarter])]
        history = staged_enumeration(streams, self._ok, t_max=2, depth=2)
        # stream 2 is not polled at stage 1
        assert all(m == 0 for m in history[1][1].leaf_mass)
        assert history[2][1].leaf_mass == quarter

    def test_zero_table_must_satisfy_predicate(self):
        with pytest.raises(InputError):
            staged_enumeration([_table_stream([(F(0),) * 4])], lambda sm: sm.total() > 0,
                               t_max=1, depth=2)


class TestMarkovFamily:
    def test_k0_g2_has_six_tables(self):
        assert len(markov_family(0, 2).tables) == 6

    def test_k0_g1_has_three_tables(self):
        assert len(markov_family(0, 1).tables) == 3

    def test_row_enumeration_oracle(self):
        rows = grid_rows(2)
        assert set(rows) == {
            (F(0), F(0)), (F(0), F(1, 2)), (F(0), F(1)),
            (F(1, 2), F(0)), (F(1, 2), F(1, 2)), (F(1), F(0)),
        }

    def test_uniform_table_unrolls_to_uniform(self):
        fam = markov_family(0, 2)
        uniform = next(t for t in fam.tables if t.rows[()] == (F(1, 2), F(1, 2)))
        assert uniform.unroll(2).leaf_mass == (F(1, 4),) * 4

    def test_size_cap(self):
        with pytest.raises(FamilySizeError) as err:
            markov_family(1, 4, max_size=100)
        assert err.value.size == 15**3

    def test_k1_unroll_uses_context_rows(self):
        fam = markov_family(1, 1)
        table = next(
            t for t in fam.tables
            if t.rows[()] == (F(1), F(0)) and t.rows[(0,)] == (F(0), F(1))
            and t.rows[(1,)] == (F(1), F(0))
        )
        # path 0 -> 1 -> 0 gets all the mass
        assert table.unroll(3).leaf("010") == 1


class TestPairFamilyAndStaircase:
    def test_family_size_and_properness(self):
        comps = pair_family(1, 2)
        assert len(comps) == 486  # 9 tables x 9 tables x 6 wiring pairs
        assert all(c.x_table.is_proper() and c.y_table.is_proper() for c in comps)

    def test_double_instantaneous_rejected(self):
        comps = pair_family(1, 2)
        with pytest.raises(InputError):
            type(comps[0])(comps[0].x_table, Wiring.CROSS_INST, comps[0].y_table, Wiring.CROSS_INST)

    def test_staircase_matches_dense_oracle(self):
        comps = pair_family(1, 2)[:50]
        mix = BivariateMixture(comps, grid=2, scheme="ilog2")
        depth = 3
        size = 2**depth
        masses = [F(0)] * (size * size)
        for w, c in zip(mix.weights, comps):
            for x in iter_words(depth, 2):
                for y in iter_words(depth, 2):
                    masses[word_index(x, 2) * size + word_index(y, 2)] += w * c.pair_mass(x, y)
        dense = BivariateSemimeasure(depth, 2, tuple(masses))
        for pair in (((0, 1, 1), (1, 0, 0)), ((0, 0, 0), (1, 1, 1))):
            fast = mix.staircase(*pair)
            ref = staircase_from_bivariate(dense, *pair)
            assert fast.diag == ref.diag
            assert fast.x_first == ref.x_first
            assert fast.y_first == ref.y_first
            assert fast.marginal_x == ref.marginal_x
            assert fast.marginal_y == ref.marginal_y

    def test_mixture_total_is_weight_sum(self):
        comps = pair_family(1, 2)[:20]
        mix = BivariateMixture(comps, grid=2)
        total = sum(
            mix.staircase(x, y).pair()
            for x in iter_words(2, 2)
            for y in iter_words(2, 2)
        )
        assert total == sum(mix.weights)  # proper components are probability measures


class TestExpectationBound:
    def test_probability_components_between_zero_and_model_cost(self):
        from semicausal.influence import expectation_bound_holds

        fam = markov_family(0, 2)
        comps = fam.unrolled(3)
        mix = build_mixture(comps, scheme="dyadic")
        dense = mix.dense()
        for w, P in zip(mix.weights, comps):
            if P.total() != 1:
                continue
            ok, value, upper = expectation_bound_holds(P, dense, w)
            assert ok, (value, upper)
