import numpy as np
import pytest

from brandsim import (
    ConfigurationError,
    KernelParams,
    Mode,
    NeedSchema,
    Population,
    TimeSeriesRecord,
    brand_shares,
    consensus_reached,
    distance,
    dominant_brand,
    fluctuation,
    snapshot,
    sweep,
)


def make_population(rng, K=5, N=2, jmax=(2, 3), p_unknown=0.2):
    schema = NeedSchema(jmax)
    S = schema.total_slots
    wish = 1.0 - rng.random((K, S))
    wish[rng.random((K, S)) < p_unknown] = 0.0
    assort = 1.0 - rng.random((N, S))
    return Population(schema, wish, rng.random(K), assort, (1,) * N)


def naive_fluctuation(pop):
    """Brute-force mean pairwise distance (the oracle)."""
    K = pop.num_customers
    total = 0.0
    count = 0
    for a in range(K):
        for b in range(a + 1, K):
            total += distance(pop.wish_matrix[a], pop.wish_matrix[b])
            count += 1
    return total / count


class TestFluctuation:
    def test_identical_wishes_give_exact_zero(self):
        rng = np.random.default_rng(0)
        schema = NeedSchema((2, 1))
        row = 1.0 - rng.random(3)
        wish = np.tile(row, (7, 1))
        pop = Population(schema, wish, rng.random(7), [1.0 - rng.random(3)], (1,))
        assert fluctuation(pop) == 0.0

    def test_two_customers_equal_single_distance(self):
        rng = np.random.default_rng(1)
        pop = make_population(rng, K=2)
        expected = distance(pop.wish_matrix[0], pop.wish_matrix[1])
        assert fluctuation(pop) == pytest.approx(expected, rel=1e-12)

    def test_matches_naive_double_loop(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            pop = make_population(rng, K=5, jmax=(3, 1, 2))
            assert fluctuation(pop) == pytest.approx(naive_fluctuation(pop), rel=1e-12)

    def test_zero_only_when_bitwise_equal(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            pop = make_population(rng, K=4)
            f = fluctuation(pop)
            rows_equal = bool((pop.wish_matrix == pop.wish_matrix[0]).all())
            assert (f == 0.0) == rows_equal
            assert f >= 0.0

    def test_customer_relabelling_invariance(self):
        rng = np.random.default_rng(4)
        pop = make_population(rng, K=6)
        perm = rng.permutation(6)
        shuffled = Population(
            pop.schema,
            pop.wish_matrix[perm],
            pop.ranks[perm],
            pop.assortment_matrix,
            pop.shop_counts,
        )
        assert fluctuation(shuffled) == pytest.approx(fluctuation(pop), rel=1e-12)

    def test_rejects_tiny_population(self):
        # Population itself enforces K >= 2, so check the guard directly
        rng = np.random.default_rng(5)
        pop = make_population(rng, K=2)
        pop.wish_matrix = pop.wish_matrix[:1]
        with pytest.raises(ConfigurationError):
            fluctuation(pop)


class TestBrandShares:
    def test_single_brand(self):
        rng = np.random.default_rng(6)
        pop = make_population(rng, N=1)
        assert list(brand_shares(pop)) == [1.0]

    def test_counting(self):
        schema = NeedSchema((1,))
        assort = np.array([[0.2], [0.5], [0.8]])
        # wishes sit exactly on brand assortments, forcing the affiliations
        wish = np.array([[0.2], [0.2], [0.5], [0.8]])
        pop = Population(schema, wish, np.zeros(4), assort, (1, 1, 1))
        assert list(pop.affiliations) == [0, 0, 1, 2]
        assert list(brand_shares(pop)) == [0.5, 0.25, 0.25]

    def test_shares_sum_to_one(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            pop = make_population(rng, K=9, N=4)
            assert abs(brand_shares(pop).sum() - 1.0) <= 1e-12

    def test_brand_relabelling_permutes_shares(self):
        rng = np.random.default_rng(8)
        pop = make_population(rng, K=12, N=4)
        perm = list(rng.permutation(4))
        relabelled = Population(
            pop.schema,
            pop.wish_matrix,
            pop.ranks,
            pop.assortment_matrix[perm],
            tuple(pop.shop_counts[p] for p in perm),
        )
        base = brand_shares(pop)
        moved = brand_shares(relabelled)
        for new_idx, old_idx in enumerate(perm):
            assert moved[new_idx] == base[old_idx]


class TestConsensus:
    def test_identical_wishes_true_for_any_epsilon(self):
        rng = np.random.default_rng(9)
        schema = NeedSchema((2,))
        row = np.array([0.4, 0.9])
        pop = Population(schema, np.tile(row, (3, 1)), rng.random(3), [[0.5, 0.5]], (1,))
        assert consensus_reached(pop, 1e-300)

    def test_threshold_semantics(self):
        schema = NeedSchema((1,))
        wish = np.array([[0.2], [0.6]])
        pop = Population(schema, wish, np.zeros(2), [[0.5]], (1,))
        d = fluctuation(pop)
        assert not consensus_reached(pop, d / 2)
        assert consensus_reached(pop, d * 2)

    def test_monotone_in_epsilon(self):
        rng = np.random.default_rng(10)
        pop = make_population(rng)
        f = fluctuation(pop)
        for eps in (f / 10, f, f * 10):
            if consensus_reached(pop, eps):
                assert consensus_reached(pop, eps * 2)

    def test_rejects_nonpositive_epsilon(self):
        rng = np.random.default_rng(11)
        pop = make_population(rng)
        with pytest.raises(ConfigurationError):
            consensus_reached(pop, 0.0)

    def test_constant_under_frozen_dynamics(self):
        rng = np.random.default_rng(12)
        pop = make_population(rng, K=6)
        params = KernelParams(p_copy=0.0)
        f0 = fluctuation(pop)
        for _ in range(100):
            sweep(pop, Mode.EQUALITY, params, rng)
            assert fluctuation(pop) == f0


class TestDominantBrand:
    def test_single(self):
        assert dominant_brand([1.0]) == 0

    def test_tie_to_smallest_index(self):
        assert dominant_brand([0.5, 0.5]) == 0
        assert dominant_brand([0.2, 0.4, 0.4]) == 1

    def test_matches_linear_scan(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            v = rng.random(7)
            v /= v.sum()
            best = max(range(7), key=lambda i: (v[i], -i))
            assert dominant_brand(v) == best

    def test_rejects_empty(self):
        with pytest.raises(ConfigurationError):
            dominant_brand([])


class TestTimeSeriesRecord:
    def test_snapshot_is_consistent(self):
        rng = np.random.default_rng(14)
        pop = make_population(rng, K=8, N=3)
        rec = snapshot(pop)
        assert rec.t == pop.t
        assert rec.fluctuation == fluctuation(pop)
        assert rec.dominant == dominant_brand(rec.shares)

    def test_validation(self):
        with pytest.raises(ValueError):
            TimeSeriesRecord(t=0, fluctuation=0.1, shares=(0.5, 0.4), dominant=0)
        with pytest.raises(ValueError):
            TimeSeriesRecord(t=0, fluctuation=0.1, shares=(0.5, 0.5), dominant=1)
        with pytest.raises(ValueError):
            TimeSeriesRecord(t=0, fluctuation=-0.1, shares=(1.0,), dominant=0)
