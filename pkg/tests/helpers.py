"""Random instance generators shared by the test modules."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from bo_influence.dataset import Dataset, FeatureSpace
from bo_influence.games import Game, sample_from_game
from bo_influence.partition import DependencyModel, Partition


def random_partition(rng: np.random.Generator, k: int) -> Partition:
    labels = rng.integers(0, k, size=k)
    blocks: dict[int, list[int]] = {}
    for i, lab in enumerate(labels.tolist()):
        blocks.setdefault(lab, []).append(i)
    order = rng.permutation(len(blocks))
    values = list(blocks.values())
    return Partition(tuple(tuple(values[j]) for j in order))


def random_monotone_table(rng: np.random.Generator, k: int) -> np.ndarray:
    """Upward closure of a few random non-empty generator coalitions."""
    masks = np.arange(1 << k, dtype=np.int64)
    table = np.zeros(1 << k)
    for _ in range(int(rng.integers(0, k + 3))):
        gen = int(rng.integers(1, 1 << k))
        table[(masks & gen) == gen] = 1.0
    return table


def random_monotone_game(rng: np.random.Generator, k: int) -> Game:
    return Game(k, table=random_monotone_table(rng, k))


def random_table_game(rng: np.random.Generator, k: int) -> Game:
    """Arbitrary integer-valued game with v(empty) = 0."""
    table = rng.integers(-3, 4, size=1 << k).astype(float)
    table[0] = 0
    return Game(k, table=table)


def random_full_sample(rng: np.random.Generator, k: int) -> Dataset:
    return sample_from_game(random_monotone_game(rng, k))


def random_dataset(
    rng: np.random.Generator,
    max_k: int = 6,
    max_n: int = 64,
    binary: bool = False,
    weighted: bool = False,
) -> Dataset:
    """Distinct random profiles over small alphabets with random responses."""
    k = int(rng.integers(1, max_k + 1))
    counts = [2] * k if binary else rng.integers(2, 4, size=k).tolist()
    space = FeatureSpace(tuple(f"f{i}" for i in range(k)), tuple(counts))
    total = int(np.prod(counts))
    n = int(rng.integers(1, min(max_n, total) + 1))
    codes = rng.choice(total, size=n, replace=False)
    profiles = np.array(np.unravel_index(codes, counts)).T.reshape(n, k)
    y = rng.integers(0, 2, size=n)
    freq = rng.integers(1, 5, size=n) if weighted else None
    return Dataset(space, profiles, y, freq)


def random_dependency(rng: np.random.Generator, space: FeatureSpace, p: Partition) -> DependencyModel:
    """Random signs on binary non-representative members; representatives stay positive."""
    signs = [1] * space.k
    for block in p.blocks:
        if all(space.state_counts[q] == 2 for q in block):
            for q in block[1:]:
                signs[q] = int(rng.choice([1, -1]))
    return DependencyModel(tuple(signs))


@st.composite
def datasets(draw, max_k: int = 5, max_n: int = 32, binary: bool = False, weighted: bool = False):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_dataset(np.random.default_rng(seed), max_k, max_n, binary, weighted)


@st.composite
def dataset_with_partition(draw, max_k: int = 5, max_n: int = 32, binary: bool = False):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    d = random_dataset(rng, max_k, max_n, binary)
    p = random_partition(rng, d.k)
    return d, p, random_dependency(rng, d.space, p)


seeds = st.integers(0, 2**32 - 1)
