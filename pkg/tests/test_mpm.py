import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from plopt.mpm import (
    compressed_complexity, entropy_of_group, greedy_mpm_search, marginal_table, mdl_score,
    model_complexity, model_from_partition, sample_individual, sample_population,
)

from oracles import entropy_from_counts, exhaustive_best, mdl_naive, set_partitions


def pop_of(rows):
    return np.array(rows, dtype=np.uint8)


def table_of(rows, genes):
    return marginal_table(pop_of(rows), genes)


class TestEntropy:
    def test_uniform_bit(self):
        assert entropy_of_group(table_of([[0]] * 5 + [[1]] * 5, [0])) == pytest.approx(1.0, abs=1e-9)

    def test_degenerate(self):
        assert entropy_of_group(table_of([[1, 0]] * 7, [0, 1])) == 0.0

    def test_uniform_two_bits(self):
        rows = [list(r) for r in itertools.product([0, 1], repeat=2)] * 3
        assert entropy_of_group(table_of(rows, [0, 1])) == pytest.approx(2.0, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(arrays(np.uint8, st.tuples(st.integers(1, 40), st.integers(1, 4)), elements=st.integers(0, 1)))
    def test_bounds_and_oracle(self, pop):
        genes = list(range(pop.shape[1]))
        t = marginal_table(pop, genes)
        e = entropy_of_group(t)
        assert -1e-12 <= e <= len(genes) + 1e-12
        assert t.counts.sum() == len(pop)
        assert t.probabilities.sum() == pytest.approx(1.0)
        assert len(t.counts) <= 2 ** len(genes)
        assert e == pytest.approx(entropy_from_counts(t.counts.tolist()), abs=1e-9)


@pytest.mark.parametrize("partition, n, expected", [
    ([[0], [1], [2], [3]], 15, 16.0),
    ([[0, 1, 2, 3]], 15, 60.0),
    ([[0]], 3, 2.0),
])
def test_model_complexity(partition, n, expected):
    assert model_complexity(partition, n) == pytest.approx(expected, abs=1e-9)


def test_compressed_complexity_examples():
    identical = pop_of([[1, 0, 1]] * 9)
    assert compressed_complexity([[0], [1], [2]], identical) == 0.0
    assert compressed_complexity([[0, 1, 2]], identical) == 0.0
    assert compressed_complexity([[0]], pop_of([[0], [0], [1], [1]])) == pytest.approx(4.0, abs=1e-9)
    assert compressed_complexity([[0, 1]], pop_of([[0, 0]] * 4 + [[1, 1]] * 4)) == pytest.approx(8.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 30), st.integers(1, 5)), elements=st.integers(0, 1)))
def test_score_matches_naive_oracle(pop):
    rows = [tuple(r) for r in pop.tolist()]
    for part in itertools.islice(set_partitions(range(pop.shape[1])), 10):
        assert mdl_score(part, pop).combined == pytest.approx(mdl_naive(part, rows), abs=1e-9)


class TestGreedySearch:
    def test_two_blocks_become_one_group_at_n64(self):
        pop = pop_of([[0, 0, 0, 0]] * 32 + [[1, 1, 1, 1]] * 32)
        assert greedy_mpm_search(pop).partition == ((0, 1, 2, 3),)
        assert exhaustive_best(pop.tolist())[1] == [[0, 1, 2, 3]]

    def test_small_population_prefers_pairs_like_the_oracle(self):
        # At N=16 two pairs are cheaper than one 4-gene group: 6*log2(17)+32 < 15*log2(17)+16.
        pop = pop_of([[0, 0, 0, 0]] * 8 + [[1, 1, 1, 1]] * 8)
        assert greedy_mpm_search(pop).partition == ((0, 1), (2, 3))
        assert sorted(map(sorted, exhaustive_best(pop.tolist())[1])) == [[0, 1], [2, 3]]

    def test_correlated_pair_is_merged(self):
        rng = np.random.default_rng(1)
        a = rng.integers(0, 2, 16)
        pop = np.stack([a, a, rng.integers(0, 2, 16)], axis=1).astype(np.uint8)
        merged = mdl_naive([[0, 1], [2]], pop.tolist())
        split = mdl_naive([[0], [1], [2]], pop.tolist())
        assert merged < split
        assert (0, 1) in greedy_mpm_search(pop).partition

    @pytest.mark.parametrize("seed", range(10))
    def test_random_bits_agree_with_pairwise_oracle(self, seed):
        pop = np.random.default_rng(seed).integers(0, 2, (64, 6), dtype=np.uint8)
        rows = pop.tolist()
        base = mdl_naive([[i] for i in range(6)], rows)
        any_gain = any(
            mdl_naive([[i, j]] + [[k] for k in range(6) if k not in (i, j)], rows) < base - 1e-9
            for i, j in itertools.combinations(range(6), 2)
        )
        singletons = greedy_mpm_search(pop).partition == tuple((i,) for i in range(6))
        assert singletons == (not any_gain)

    def test_large_random_population_stays_singletons(self):
        pop = np.random.default_rng(7).integers(0, 2, (1024, 8), dtype=np.uint8)
        assert greedy_mpm_search(pop).partition == tuple((i,) for i in range(8))

    @settings(max_examples=60, deadline=None)
    @given(arrays(np.uint8, st.tuples(st.integers(1, 40), st.integers(1, 5)), elements=st.integers(0, 1)))
    def test_never_beats_exhaustive_and_never_worse_than_singletons(self, pop):
        rows = pop.tolist()
        model = greedy_mpm_search(pop)
        got = mdl_naive([list(g) for g in model.partition], rows)
        best, _ = exhaustive_best(rows)
        assert got >= best - 1e-9
        assert got <= mdl_naive([[i] for i in range(pop.shape[1])], rows) + 1e-9

    def test_partition_covers_every_gene_once(self):
        pop = np.random.default_rng(3).integers(0, 2, (200, 30), dtype=np.uint8)
        pop[:, 5:10] = pop[:, [5]]
        genes = sorted(g for grp in greedy_mpm_search(pop).partition for g in grp)
        assert genes == list(range(30))

    def test_separable_blocks_recovered_like_exhaustive(self):
        rng = np.random.default_rng(11)
        a = rng.integers(0, 2, (200, 1)).repeat(3, axis=1)
        b = rng.integers(0, 2, (200, 1)).repeat(2, axis=1)
        pop = np.concatenate([a, b], axis=1).astype(np.uint8)
        model = greedy_mpm_search(pop)
        best, part = exhaustive_best(pop.tolist())
        assert sorted(map(sorted, part)) == [[0, 1, 2], [3, 4]]
        assert mdl_naive([list(g) for g in model.partition], pop.tolist()) == pytest.approx(best, abs=1e-9)


def test_greedy_accepted_merges_strictly_decrease_score():
    # Replay the greedy merge order through the naive oracle.
    rng = np.random.default_rng(5)
    blocks = rng.integers(0, 2, (300, 3)).repeat(4, axis=1)
    noise = rng.random(blocks.shape) < 0.05
    pop = (blocks ^ noise).astype(np.uint8)
    final = greedy_mpm_search(pop).partition
    rows = pop.tolist()
    assert mdl_naive([list(g) for g in final], rows) < mdl_naive([[i] for i in range(12)], rows)
    assert sorted(map(sorted, final)) == [list(range(0, 4)), list(range(4, 8)), list(range(8, 12))]


class TestSampling:
    def test_degenerate_model_reproduces_its_genome(self):
        pop = pop_of([[1, 0, 1, 1, 0]] * 6)
        model = model_from_partition(pop, [[0, 3], [1], [2, 4]])
        rng = np.random.default_rng(0)
        for _ in range(5):
            assert sample_individual(model, rng).tolist() == [1, 0, 1, 1, 0]
        again = model_from_partition(sample_population(model, 50, rng), model.partition)
        assert again.dump() == model.dump()

    def test_marginal_frequency(self):
        pop = pop_of([[1]] * 3 + [[0]])
        model = model_from_partition(pop, [[0]])
        draws = sample_population(model, 10_000, np.random.default_rng(2))
        assert abs(draws.mean() - 0.75) <= 0.02

    def test_groups_are_independent(self):
        pop = pop_of([[0, 0], [1, 1]])
        model = model_from_partition(pop, [[0], [1]])
        draws = sample_population(model, 10_000, np.random.default_rng(3))
        for a, b in itertools.product([0, 1], repeat=2):
            freq = np.mean((draws[:, 0] == a) & (draws[:, 1] == b))
            assert abs(freq - 0.25) <= 0.02

    def test_joint_group_marginals_preserved(self):
        rng = np.random.default_rng(4)
        pop = rng.integers(0, 2, (37, 6), dtype=np.uint8)
        pop[:, 1] = pop[:, 0]
        model = greedy_mpm_search(pop)
        draws = sample_population(model, 10_000, rng)
        for t in model.tables:
            observed = marginal_table(draws, t.genes)
            # Unobserved patterns can never be drawn.
            assert set(map(tuple, observed.outcomes.tolist())) <= set(map(tuple, t.outcomes.tolist()))
            lookup = {tuple(o): c / 10_000 for o, c in zip(observed.outcomes.tolist(), observed.counts)}
            for o, p in zip(t.outcomes.tolist(), t.probabilities):
                assert abs(lookup.get(tuple(o), 0.0) - p) <= 0.02


def test_dump_format():
    pop = pop_of([[0, 0, 1]] * 2 + [[1, 1, 1]] * 2)
    model = model_from_partition(pop, [[0, 1], [2]])
    assert model.dump() == "[0,1] 00=0.5 11=0.5\n[2] 1=1"


def test_empty_population_rejected():
    with pytest.raises(ValueError):
        greedy_mpm_search(np.empty((0, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        model_complexity([[0]], 0)
