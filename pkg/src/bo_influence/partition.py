"""A-priori unions over features and the restrictions they induce.

A :class:`Partition` groups feature indices into unions.  Together with
a :class:`DependencyModel` it defines, for every union ``t``, the
subsample in which every *other* union follows its dependency model:
features with a positive sign repeat the value of the union's
representative (its lowest index), features with a negative sign take
the opposite binary value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import prod
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dataset import Dataset, FeatureSpace
from .errors import (
    BadClusterCount,
    InvalidDependency,
    LengthMismatch,
    NegativeSignOnNonBinary,
    NonBinaryColumn,
    NonBinaryFeature,
    NotAPartition,
    UnknownFeature,
)


@dataclass(frozen=True)
class Partition:
    """Disjoint non-empty blocks covering ``0..k-1``.

    Block order is significant (it fixes the block index ``t``); members
    inside a block are stored sorted.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(i) for i in b)) for b in self.blocks)
        if not blocks:
            raise NotAPartition("a partition needs at least one block")
        if any(len(b) == 0 for b in blocks):
            raise NotAPartition("empty block")
        members = [i for b in blocks for i in b]
        if len(set(members)) != len(members):
            raise NotAPartition(f"blocks overlap: {blocks}")
        if sorted(members) != list(range(len(members))):
            raise NotAPartition(f"blocks do not cover 0..{len(members) - 1}: {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def k(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def m(self) -> int:
        return len(self.blocks)

    def block_of(self, feature: int) -> int:
        for t, b in enumerate(self.blocks):
            if feature in b:
                return t
        raise UnknownFeature(f"feature {feature} not in partition")

    def block_index(self) -> list[int]:
        """Block index of every feature, as a list of length ``k``."""
        out = [0] * self.k
        for t, b in enumerate(self.blocks):
            for i in b:
                out[i] = t
        return out

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        """Blocks sorted by their lowest member, for order-free comparison."""
        return tuple(sorted(self.blocks))

    def same_blocks(self, other: Partition) -> bool:
        return self.canonical() == other.canonical()

    def is_singletons(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def to_list(self, one_based: bool = False) -> list[list[int]]:
        off = 1 if one_based else 0
        return [[i + off for i in b] for b in self.blocks]

    def __str__(self):
        return "{" + ",".join("{" + ",".join(str(i + 1) for i in b) + "}" for b in self.blocks) + "}"


def singleton_partition(k: int) -> Partition:
    if k < 1:
        raise NotAPartition("k must be at least 1")
    return Partition(tuple((i,) for i in range(k)))


def whole_partition(k: int) -> Partition:
    return Partition((tuple(range(k)),))


def partition_from_spec(spec: Iterable[Iterable], space: FeatureSpace) -> Partition:
    """Resolve a list of lists of feature names or zero-based indices."""
    blocks = []
    for block in spec:
        resolved = []
        for item in block:
            try:
                resolved.append(space.index_of(item))
            except (ValueError, IndexError):
                raise UnknownFeature(f"unknown feature {item!r}") from None
        blocks.append(resolved)
    return Partition(tuple(tuple(b) for b in blocks))


def parse_partition(json_path, space: FeatureSpace) -> Partition:
    spec = json.loads(Path(json_path).read_text(encoding="utf-8"))
    if not isinstance(spec, list) or not all(isinstance(b, list) for b in spec):
        raise NotAPartition(f"{json_path}: expected a JSON array of arrays")
    return partition_from_spec(spec, space)


def detach(p: Partition, q: int) -> Partition:
    """Move ``q`` out of its block into a new singleton block appended last."""
    t = p.block_of(q)
    if len(p.blocks[t]) == 1:
        return p
    blocks = list(p.blocks)
    blocks[t] = tuple(i for i in blocks[t] if i != q)
    blocks.append((q,))
    return Partition(tuple(blocks))


@dataclass(frozen=True)
class DependencyModel:
    """Per-feature association sign (+1 or -1) relative to the block representative."""

    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if any(s not in (1, -1) for s in signs):
            raise InvalidDependency(f"signs must be +1 or -1: {signs}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def positive(cls, k: int) -> DependencyModel:
        return cls((1,) * k)

    @property
    def all_positive(self) -> bool:
        return all(s == 1 for s in self.signs)

    def to_json(self, space: FeatureSpace | None = None) -> dict[str, str]:
        names = space.names if space is not None else [str(i) for i in range(len(self.signs))]
        return {names[i]: ("+" if s > 0 else "-") for i, s in enumerate(self.signs)}


_SIGN_TOKENS = {"+": 1, "-": -1, "−": -1, "positive": 1, "negative": -1}


def parse_dependency(json_path, space: FeatureSpace) -> DependencyModel:
    """Read a ``{feature: "+"|"-"}`` map; omitted features are positive."""
    raw = json.loads(Path(json_path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise InvalidDependency(f"{json_path}: expected a JSON object")
    signs = [1] * space.k
    for key, token in raw.items():
        try:
            idx = space.index_of(int(key) if str(key).isdigit() else key)
        except (ValueError, IndexError):
            raise UnknownFeature(f"unknown feature {key!r}") from None
        if token not in _SIGN_TOKENS:
            raise InvalidDependency(f"bad sign {token!r} for {key!r}")
        signs[idx] = _SIGN_TOKENS[token]
    return DependencyModel(tuple(signs))


def _check_model(space: FeatureSpace, p: Partition, dep: DependencyModel | None, t: int) -> DependencyModel:
    if p.k != space.k:
        raise NotAPartition(f"partition covers {p.k} features, space has {space.k}")
    if not 0 <= t < p.m:
        raise IndexError(f"block index {t} out of range")
    dep = dep or DependencyModel.positive(space.k)
    if len(dep.signs) != space.k:
        raise InvalidDependency("dependency model length differs from feature count")
    for u, block in enumerate(p.blocks):
        if len(block) < 2:
            continue
        if dep.signs[block[0]] != 1:
            raise InvalidDependency(f"representative {block[0]} of block {u} must be positive")
        if u != t and any(dep.signs[q] == -1 for q in block):
            if any(space.state_counts[q] != 2 for q in block):
                raise NegativeSignOnNonBinary(f"block {u} mixes a negative sign with a non-binary feature")
    return dep


def adherence_mask(d: Dataset, p: Partition, dep: DependencyModel | None, t: int) -> np.ndarray:
    """Boolean row mask of the subsample restricted for block ``t``."""
    dep = _check_model(d.space, p, dep, t)
    keep = np.ones(d.n, dtype=bool)
    for u, block in enumerate(p.blocks):
        if u == t or len(block) < 2:
            continue
        rep = d.profiles[:, block[0]]
        for q in block[1:]:
            target = rep if dep.signs[q] == 1 else 1 - rep
            keep &= d.profiles[:, q] == target
    return keep


def restrict_sample(d: Dataset, p: Partition, dep: DependencyModel | None, t: int) -> Dataset:
    """Rows in which every union other than ``t`` follows the dependency model."""
    return d.take(adherence_mask(d, p, dep, t))


def restricted_space_count(space: FeatureSpace, p: Partition, dep: DependencyModel | None, t: int) -> int:
    """Number of full profiles admissible for block ``t``.

    Block ``t`` is unconstrained.  Another block admits one profile per
    value of its representative that every member can follow, i.e. the
    smallest alphabet in the block (two for binary blocks of either sign).
    """
    dep = _check_model(space, p, dep, t)
    sizes = space.state_counts
    total = prod(sizes[q] for q in p.blocks[t])
    for u, block in enumerate(p.blocks):
        if u != t:
            total *= min(sizes[q] for q in block)
    return total


def jaccard_fraction(col_a, col_b, weights=None) -> Fraction:
    a = np.asarray(col_a)
    b = np.asarray(col_b)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"columns have shapes {a.shape} and {b.shape}")
    for c in (a, b):
        if not np.isin(c, (0, 1)).all():
            raise NonBinaryColumn("Jaccard distance needs 0/1 columns")
    w = np.ones(len(a), dtype=np.int64) if weights is None else np.asarray(weights, dtype=np.int64)
    a = a.astype(bool)
    b = b.astype(bool)
    union = int(w[a | b].sum())
    if union == 0:
        return Fraction(0)
    return 1 - Fraction(int(w[a & b].sum()), union)


def jaccard_distance(col_a, col_b, weights=None) -> float:
    """``1 - |a & b| / |a | b|`` for binary columns; 0 when both are all-zero.

    ``weights`` counts each position that many times.
    """
    return float(jaccard_fraction(col_a, col_b, weights))


LINKAGES = ("complete", "average", "single")


def hierarchical_partition(d: Dataset, k_clusters: int, linkage: str = "complete") -> Partition:
    """Agglomerative clustering of feature columns under the Jaccard distance.

    Column positions are weighted by row frequency.  Distances are exact
    rationals; among equally close cluster pairs the one whose
    lowest-member pair is lexicographically smallest is merged first.
    Blocks are returned ordered by their lowest member.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}")
    if not d.space.is_binary:
        raise NonBinaryFeature("hierarchical clustering needs binary features")
    k = d.k
    if not 1 <= k_clusters <= k:
        raise BadClusterCount(f"k_clusters must lie in 1..{k}, got {k_clusters}")

    dist = {}
    for i, j in combinations(range(k), 2):
        dist[i, j] = dist[j, i] = jaccard_fraction(d.profiles[:, i], d.profiles[:, j], d.freq)

    def between(a: Sequence[int], b: Sequence[int]) -> Fraction:
        values = [dist[i, j] for i in a for j in b]
        if linkage == "complete":
            return max(values)
        if linkage == "single":
            return min(values)
        return sum(values, Fraction(0)) / len(values)

    clusters = [[i] for i in range(k)]
    while len(clusters) > k_clusters:
        best = None
        for x, y in combinations(range(len(clusters)), 2):
            key = (between(clusters[x], clusters[y]), clusters[x][0], clusters[y][0])
            if best is None or key < best[0]:
                best = (key, x, y)
        _, x, y = best
        merged = sorted(clusters[x] + clusters[y])
        clusters = [c for i, c in enumerate(clusters) if i not in (x, y)] + [merged]
        clusters.sort(key=lambda c: c[0])
    return Partition(tuple(tuple(c) for c in clusters))
