import json

import numpy as np
import pytest
from hypothesis import given, settings
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import pdist

from bo_influence.dataset import Dataset, FeatureSpace
from bo_influence.errors import (
    BadClusterCount,
    InvalidDependency,
    LengthMismatch,
    NegativeSignOnNonBinary,
    NonBinaryColumn,
    NonBinaryFeature,
    NotAPartition,
    UnknownFeature,
)
from bo_influence.fixtures import CRASH_FEATURES, example_dataset
from bo_influence.oracle import restrict_sample_naive, restricted_space_count_naive
from bo_influence.partition import (
    DependencyModel,
    Partition,
    detach,
    hierarchical_partition,
    jaccard_distance,
    parse_dependency,
    parse_partition,
    restrict_sample,
    restricted_space_count,
    singleton_partition,
    whole_partition,
)

from helpers import dataset_with_partition, random_dataset, random_partition, seeds


def test_singleton_partition():
    assert singleton_partition(4).blocks == ((0,), (1,), (2,), (3,))
    assert singleton_partition(1).blocks == ((0,),)
    assert singleton_partition(7).m == 7
    with pytest.raises(NotAPartition):
        singleton_partition(0)


def test_partition_validation():
    with pytest.raises(NotAPartition):
        Partition(((0,), (0, 1)))
    with pytest.raises(NotAPartition):
        Partition(((0,), (2,)))
    with pytest.raises(NotAPartition):
        Partition(((0,), ()))
    assert Partition(((1, 0),)).blocks == ((0, 1),)


def test_parse_partition_names(tmp_path):
    space = FeatureSpace.binary(10, CRASH_FEATURES)
    path = tmp_path / "cdp.json"
    path.write_text(json.dumps([["dvcat", "frontal", "ageOFocc"], ["airbag", "abcat", "deploy"],
                                ["seatbelt"], ["sex"], ["occRole"], ["age"]]))
    p = parse_partition(path, space)
    assert p.blocks[:2] == ((0, 3, 8), (1, 5, 7))
    assert p.canonical() == ((0, 3, 8), (1, 5, 7), (2,), (4,), (6,), (9,))


def test_parse_partition_indices_and_errors(tmp_path):
    space = FeatureSpace.binary(2)
    path = tmp_path / "p.json"
    path.write_text("[[0],[1]]")
    assert parse_partition(path, space) == singleton_partition(2)
    path.write_text("[[0],[0,1]]")
    with pytest.raises(NotAPartition):
        parse_partition(path, space)
    path.write_text('[["nope"],[0,1]]')
    with pytest.raises(UnknownFeature):
        parse_partition(path, space)
    path.write_text("[[0],[1],[2]]")
    with pytest.raises(UnknownFeature):
        parse_partition(path, space)


def test_detach():
    p = Partition(((0, 1), (2,), (3,)))
    assert detach(p, 1).blocks == ((0,), (2,), (3,), (1,))
    assert detach(p, 2).same_blocks(p)
    q = Partition(((0, 2, 3), (1,)))
    for f in range(4):
        q = detach(q, f)
    assert q.same_blocks(singleton_partition(4))


def test_parse_dependency(tmp_path):
    space = FeatureSpace.binary(3, ["a", "b", "c"])
    path = tmp_path / "dep.json"
    path.write_text(json.dumps({"c": "-", "b": "+"}))
    assert parse_dependency(path, space).signs == (1, 1, -1)
    path.write_text(json.dumps({"a": "?"}))
    with pytest.raises(InvalidDependency):
        parse_dependency(path, space)


def test_restrict_sample_example():
    d = example_dataset()
    p = Partition(((0,), (1,), (2, 3)))
    sub = restrict_sample(d, p, None, 0)
    assert sub.n == 8
    assert (sub.profiles[:, 2] == sub.profiles[:, 3]).all()
    assert restrict_sample(d, whole_partition(4), None, 0) == d
    for t in range(4):
        assert restrict_sample(d, singleton_partition(4), None, t) == d


def test_restrict_sample_negative_sign():
    d = example_dataset()
    p = Partition(((0,), (1,), (2, 3)))
    sub = restrict_sample(d, p, DependencyModel((1, 1, 1, -1)), 0)
    assert sub.n == 8
    assert (sub.profiles[:, 2] != sub.profiles[:, 3]).all()


def test_negative_sign_on_non_binary():
    space = FeatureSpace(("a", "b", "c"), (2, 3, 3))
    d = Dataset(space, [[0, 0, 0], [1, 2, 1]], [0, 1])
    p = Partition(((0,), (1, 2)))
    with pytest.raises(NegativeSignOnNonBinary):
        restrict_sample(d, p, DependencyModel((1, 1, -1)), 0)
    # Block t itself is unconstrained.
    assert restrict_sample(d, p, DependencyModel((1, 1, -1)), 1) == d
    with pytest.raises(InvalidDependency):
        restrict_sample(d, Partition(((0, 1), (2,))), DependencyModel((-1, 1, 1)), 1)


@settings(max_examples=80, deadline=None)
@given(dataset_with_partition())
def test_restrict_sample_matches_naive_and_is_idempotent(case):
    d, p, dep = case
    for t in range(p.m):
        sub = restrict_sample(d, p, dep, t)
        assert sub == d.take(restrict_sample_naive(d, p, dep, t))
        assert restrict_sample(sub, p, dep, t) == sub


def test_restricted_space_count_examples():
    space = FeatureSpace.binary(4)
    p = Partition(((0,), (1,), (2, 3)))
    # Enumerate the 16 profiles and keep those with a_2 == a_3.
    brute = sum(1 for r in range(16) if (r >> 1 & 1) == (r & 1))
    assert brute == 8
    assert restricted_space_count(space, p, None, 0) == 8
    assert restricted_space_count(space, whole_partition(4), None, 0) == 16
    for t in range(4):
        assert restricted_space_count(space, singleton_partition(4), None, t) == 16


def test_restricted_space_count_closed_form_exhaustive():
    rng = np.random.default_rng(11)
    for k in range(1, 13):
        space = FeatureSpace.binary(k)
        for _ in range(3 if k < 10 else 1):
            p = random_partition(rng, k)
            for t in range(p.m):
                closed = 2 ** ((p.m - 1) + len(p.blocks[t]))
                assert restricted_space_count(space, p, None, t) == closed
                assert restricted_space_count_naive(space, p, None, t) == closed


@settings(max_examples=60, deadline=None)
@given(dataset_with_partition(max_k=5))
def test_restricted_space_count_general(case):
    d, p, dep = case
    for t in range(p.m):
        assert restricted_space_count(d.space, p, dep, t) == restricted_space_count_naive(d.space, p, dep, t)


def test_jaccard_distance():
    a = np.array([1, 0, 1, 1])
    assert jaccard_distance(a, a) == 0
    assert jaccard_distance([1, 0, 0], [0, 1, 0]) == 1
    # |a & b| = 1, |a | b| = 3
    assert jaccard_distance([1, 1, 0], [1, 0, 1]) == pytest.approx(2 / 3)
    assert jaccard_distance([0, 0], [0, 0]) == 0
    with pytest.raises(LengthMismatch):
        jaccard_distance([1, 0], [1])
    with pytest.raises(NonBinaryColumn):
        jaccard_distance([2, 0], [1, 0])


def test_jaccard_matches_scipy():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b = rng.integers(0, 2, size=(2, 12))
        if a.any() or b.any():
            assert jaccard_distance(a, b) == pytest.approx(pdist(np.vstack([a, b]).astype(bool), "jaccard")[0])


def _columns_dataset(columns):
    columns = np.asarray(columns)
    k = columns.shape[0]
    return Dataset.from_records(FeatureSpace.binary(k), columns.T, np.zeros(columns.shape[1], int))


def test_hierarchical_trivial_counts():
    d = random_dataset(np.random.default_rng(2), max_k=6, binary=True)
    assert hierarchical_partition(d, d.k).same_blocks(singleton_partition(d.k))
    assert hierarchical_partition(d, 1).same_blocks(whole_partition(d.k))
    with pytest.raises(BadClusterCount):
        hierarchical_partition(d, 0)
    with pytest.raises(BadClusterCount):
        hierarchical_partition(d, d.k + 1)


def test_hierarchical_pairs():
    c0 = [1, 1, 0, 0, 1, 0]
    c2 = [0, 0, 1, 1, 0, 1]
    d = _columns_dataset([c0, c0, c2, c2])
    for link in ("complete", "average", "single"):
        assert hierarchical_partition(d, 2, link).blocks == ((0, 1), (2, 3))


def test_hierarchical_non_binary():
    d = Dataset(FeatureSpace(("a", "b"), (3, 2)), [[2, 0]], [0])
    with pytest.raises(NonBinaryFeature):
        hierarchical_partition(d, 1)


@pytest.mark.parametrize("method", ["complete", "average", "single"])
def test_hierarchical_matches_scipy_without_ties(method):
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(200):
        k = int(rng.integers(3, 9))
        cols = rng.integers(0, 2, size=(k, 40))
        dists = pdist(cols.astype(bool), "jaccard")
        if len(np.unique(np.round(dists, 12))) != len(dists):
            continue
        Z = linkage(dists, method=method)
        if len(np.unique(np.round(Z[:, 2], 12))) != len(Z):
            continue
        n_clusters = int(rng.integers(1, k + 1))
        labels = fcluster(Z, n_clusters, criterion="maxclust")
        expected = {}
        for i, lab in enumerate(labels):
            expected.setdefault(lab, []).append(i)
        if len(expected) != n_clusters:
            continue
        got = hierarchical_partition(_columns_dataset(cols), n_clusters, method)
        assert got.canonical() == tuple(sorted(tuple(v) for v in expected.values()))
        checked += 1
    assert checked >= 20


def test_hierarchical_deterministic_tie_break():
    # All pairwise distances equal: merges follow the smallest index pairs.
    d = _columns_dataset([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert hierarchical_partition(d, 2).blocks == ((0, 1), (2,))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_hierarchical_is_partition(seed):
    rng = np.random.default_rng(seed)
    d = random_dataset(rng, max_k=6, binary=True)
    k_clusters = int(rng.integers(1, d.k + 1))
    p = hierarchical_partition(d, k_clusters, str(rng.choice(["complete", "average", "single"])))
    assert p.m == k_clusters
    assert sorted(i for b in p.blocks for i in b) == list(range(d.k))
