import numpy as np
import pytest

from bo_influence.dataset import Dataset, FeatureSpace
from bo_influence.errors import EnumerationBoundExceeded, NonBinaryResponse
from bo_influence.fixtures import example_dataset, example_game, table4_partition
from bo_influence.games import table_game, weighted_majority
from bo_influence.indices import banzhaf, banzhaf_owen
from bo_influence.measures import chi
from bo_influence.oracle import banzhaf_naive, bo_naive, chi_naive
from bo_influence.partition import singleton_partition

from helpers import random_dataset, random_partition, random_table_game


def test_chi_naive_examples():
    d = example_dataset()
    assert chi_naive(d).raw == (2, 2, 10, 6)
    assert chi_naive(Dataset(d.space, d.profiles, np.zeros(16))).raw == (0, 0, 0, 0)
    with pytest.raises(NonBinaryResponse):
        chi_naive(Dataset(FeatureSpace(("a",), (2,), 3), [[0], [1]], [0, 2]))


def test_banzhaf_naive_examples():
    assert banzhaf_naive(example_game()).values == (0.125, 0.125, 0.625, 0.375)
    assert banzhaf_naive(weighted_majority([1, 0, 0, 0], 1)).values == (1.0, 0.0, 0.0, 0.0)
    with pytest.raises(EnumerationBoundExceeded):
        banzhaf_naive(weighted_majority([1] * 17, 3))


def test_bo_naive_examples():
    g = example_game()
    assert bo_naive(g, table4_partition(10)).values == (0.25, 0.0, 0.5, 0.25)
    bo, b = bo_naive(g, singleton_partition(4)), banzhaf_naive(g)
    assert (bo.values, bo.swings) == (b.values, b.swings)
    with pytest.raises(EnumerationBoundExceeded):
        bo_naive(weighted_majority([1] * 17, 3), singleton_partition(17))


def test_chi_equivalence_fuzz():
    rng = np.random.default_rng(101)
    for _ in range(500):
        d = random_dataset(rng, max_k=6, max_n=64)
        assert chi(d).raw == chi_naive(d).raw


def test_banzhaf_equivalence_fuzz():
    rng = np.random.default_rng(102)
    for _ in range(500):
        g = random_table_game(rng, int(rng.integers(1, 11)))
        fast, slow = banzhaf(g), banzhaf_naive(g)
        assert fast.swings == slow.swings
        assert fast.values == slow.values


def test_banzhaf_owen_equivalence_fuzz():
    rng = np.random.default_rng(103)
    for _ in range(300):
        k = int(rng.integers(1, 9))
        g = random_table_game(rng, k)
        p = random_partition(rng, k)
        fast, slow = banzhaf_owen(g, p), bo_naive(g, p)
        assert fast.swings == slow.swings
        assert fast.divisors == slow.divisors
        assert fast.values == slow.values


def test_real_valued_games_agree():
    rng = np.random.default_rng(104)
    for _ in range(30):
        k = int(rng.integers(1, 7))
        table = rng.random(1 << k)
        table[0] = 0
        g = table_game(table)
        p = random_partition(rng, k)
        assert banzhaf(g).values == pytest.approx(banzhaf_naive(g).values, abs=1e-12)
        assert banzhaf_owen(g, p).values == pytest.approx(bo_naive(g, p).values, abs=1e-12)
