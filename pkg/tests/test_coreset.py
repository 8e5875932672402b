"""Greedy k-center sampler tests against a brute-force oracle, counter
exactness, and determinism/tie-break properties."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streambank import ComparisonCounter, CoresetConfig, distance, greedy_sample
from streambank.errors import ConfigError, ShapeError


def brute_force_greedy(vectors, target):
    """Independent oracle: full distance matrix + literal greedy loop."""
    n = vectors.shape[1]
    anchor = vectors.mean(axis=1)
    min_dist = [float(np.linalg.norm(vectors[:, i] - anchor)) for i in range(n)]
    chosen = []
    for _ in range(target):
        best = max(range(n), key=lambda i: (min_dist[i], -i))
        chosen.append(best)
        for i in range(n):
            d = float(np.linalg.norm(vectors[:, i] - vectors[:, best]))
            if d < min_dist[i]:
                min_dist[i] = d
        min_dist[best] = -1.0
    return chosen


class TestGreedySample:
    def test_hand_worked_one_dimensional_case(self):
        # points {0, 1, 10}; mean 11/3; farthest is 10, then 0
        vectors = np.array([[0.0, 1.0, 10.0]])
        result = greedy_sample(vectors, CoresetConfig(count=2))
        assert result.indices.tolist() == [2, 0]
        assert result.counter.anchor_comparisons == 3
        assert result.counter.greedy_comparisons == 6

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(21)
        for trial in range(10):
            vectors = rng.standard_normal((4, 30))
            target = int(rng.integers(1, 30))
            result = greedy_sample(vectors, CoresetConfig(count=target))
            assert result.indices.tolist() == brute_force_greedy(vectors, target)

    def test_target_n_is_permutation_on_any_input(self):
        rng = np.random.default_rng(22)
        vectors = rng.standard_normal((3, 12))
        result = greedy_sample(vectors, CoresetConfig(count=12))
        assert sorted(result.indices.tolist()) == list(range(12))
        # duplicates everywhere: still a permutation
        dup = np.ones((3, 6))
        result = greedy_sample(dup, CoresetConfig(count=6))
        assert sorted(result.indices.tolist()) == list(range(6))

    def test_counting_model_instantiation(self):
        rng = np.random.default_rng(23)
        vectors = rng.standard_normal((5, 16))
        result = greedy_sample(vectors, CoresetConfig(count=4))
        assert result.counter.greedy_comparisons == 64

    @given(
        n=st.integers(min_value=1, max_value=40),
        data=st.data(),
    )
    @settings(max_examples=40, deadline=None)
    def test_counter_exactness_property(self, n, data):
        target = data.draw(st.integers(min_value=1, max_value=n))
        rng = np.random.default_rng(n * 1000 + target)
        vectors = rng.standard_normal((3, n))
        result = greedy_sample(vectors, CoresetConfig(count=target))
        assert result.counter.anchor_comparisons == n
        assert result.counter.greedy_comparisons == n * target
        assert len(set(result.indices.tolist())) == target

    def test_coverage_radius_non_increasing(self):
        rng = np.random.default_rng(24)
        vectors = rng.standard_normal((4, 50))
        result = greedy_sample(vectors, CoresetConfig(count=20))
        radii = []
        for upto in range(1, 21):
            sel = vectors[:, result.indices[:upto]]
            dists = np.linalg.norm(vectors[:, :, None] - sel[:, None, :], axis=0)
            radii.append(dists.min(axis=1).max())
        assert all(a >= b - 1e-12 for a, b in zip(radii, radii[1:]))

    def test_determinism(self):
        rng = np.random.default_rng(25)
        vectors = rng.standard_normal((6, 40))
        a = greedy_sample(vectors, CoresetConfig(count=10))
        b = greedy_sample(vectors.copy(), CoresetConfig(count=10))
        assert a.indices.tolist() == b.indices.tolist()
        assert a.counter == b.counter

    def test_permuted_columns_select_same_vectors(self):
        rng = np.random.default_rng(26)
        vectors = rng.standard_normal((5, 25))  # generic: distances distinct
        perm = rng.permutation(25)
        base = greedy_sample(vectors, CoresetConfig(count=8))
        swapped = greedy_sample(vectors[:, perm], CoresetConfig(count=8))
        got = np.sort(perm[swapped.indices])
        assert got.tolist() == sorted(base.indices.tolist())

    def test_rate_resolution(self):
        vectors = np.arange(10.0)[None, :]
        result = greedy_sample(vectors, CoresetConfig(rate="0.25"))
        assert len(result.indices) == 2  # floor(0.25 * 10)
        result = greedy_sample(vectors, CoresetConfig(rate="0.01"))
        assert len(result.indices) == 1  # clamped to the minimum

    def test_config_errors(self):
        vectors = np.ones((2, 3))
        with pytest.raises(ConfigError):
            greedy_sample(vectors, CoresetConfig(count=4))
        with pytest.raises(ConfigError):
            greedy_sample(np.empty((2, 0)), CoresetConfig(count=1))
        with pytest.raises(ConfigError):
            CoresetConfig(count=0)
        with pytest.raises(ConfigError):
            CoresetConfig(rate="1.5")
        with pytest.raises(ConfigError):
            CoresetConfig()
        with pytest.raises(ConfigError):
            CoresetConfig(count=2, rate="0.5")


class TestDistance:
    def test_zero_for_equal(self):
        assert distance([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_three_four_five(self):
        assert distance((0.0, 0.0), (3.0, 4.0)) == 5.0

    @given(st.integers(min_value=0, max_value=2**31))
    @settings(max_examples=25, deadline=None)
    def test_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        a, b = rng.standard_normal(6), rng.standard_normal(6)
        assert distance(a, b) == distance(b, a)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            distance([1.0], [1.0, 2.0])


def test_counter_addition():
    total = ComparisonCounter()
    total.add(ComparisonCounter(3, 12))
    total.add(ComparisonCounter(5, 10))
    assert total == ComparisonCounter(8, 22)
