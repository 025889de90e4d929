"""TU games on the feature index set.

Coalitions are bitmasks: bit ``l`` set means feature ``l`` belongs to
the coalition.  A :class:`Game` is backed either by a dense table of
``2**k`` values or by weights and a quota (weighted majority game).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dataset import Dataset, FeatureSpace, full_binary_profiles
from .errors import (
    EnumerationBoundExceeded,
    IncompleteCoverage,
    InvalidGame,
    NonBinary,
    NonZeroEmpty,
)

# Largest player count for which a dense 2**k table is materialized.
MAX_PLAYERS = 24
# Coalition masks are held in int64.
MAX_MASK_PLAYERS = 62


def check_bound(k: int, bound: int | None) -> None:
    bound = MAX_PLAYERS if bound is None else bound
    if k > bound:
        raise EnumerationBoundExceeded(f"{k} players exceeds the enumeration bound of {bound}")


def mask_of(coalition: Iterable[int]) -> int:
    mask = 0
    for i in coalition:
        mask |= 1 << int(i)
    return mask


def members(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@dataclass(frozen=True, eq=False)
class Game:
    k: int
    table: np.ndarray | None = None
    weights: tuple[float, ...] | None = None
    quota: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise InvalidGame("a game needs at least one player")
        if (self.table is None) == (self.weights is None):
            raise InvalidGame("give exactly one of table or (weights, quota)")
        if self.table is not None:
            table = np.array(self.table, dtype=np.float64)
            if table.shape != (1 << self.k,):
                raise InvalidGame(f"table must have 2**{self.k} entries")
            if not np.isfinite(table).all():
                raise InvalidGame("table values must be finite")
            if table[0] != 0:
                raise InvalidGame("v(empty coalition) must be 0")
            table.setflags(write=False)
            object.__setattr__(self, "table", table)
        else:
            weights = tuple(float(w) for w in self.weights)
            if len(weights) != self.k:
                raise InvalidGame("one weight per player")
            if any(w < 0 for w in weights):
                raise InvalidGame("weights must be non-negative")
            if self.quota is None or not self.quota > 0:
                raise InvalidGame("quota must be positive")
            object.__setattr__(self, "weights", weights)
            object.__setattr__(self, "quota", float(self.quota))
        if self.k > MAX_MASK_PLAYERS:
            raise EnumerationBoundExceeded(f"at most {MAX_MASK_PLAYERS} players are supported")

    @property
    def is_weighted(self) -> bool:
        return self.weights is not None

    def value(self, mask: int) -> float:
        if self.table is not None:
            return float(self.table[mask])
        total = sum(w for i, w in enumerate(self.weights) if mask >> i & 1)
        return 1.0 if total >= self.quota else 0.0

    def values(self, masks: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`value` over an integer array of masks."""
        masks = np.asarray(masks, dtype=np.int64)
        if self.table is not None:
            return self.table[masks]
        total = np.zeros(masks.shape, dtype=np.float64)
        for i, w in enumerate(self.weights):
            if w:
                total += w * ((masks >> i) & 1)
        return (total >= self.quota).astype(np.float64)

    def to_table(self, max_players: int | None = None) -> np.ndarray:
        if self.table is not None:
            return self.table
        check_bound(self.k, max_players)
        return self.values(np.arange(1 << self.k, dtype=np.int64))

    def materialize(self, max_players: int | None = None) -> Game:
        return self if self.table is not None else Game(self.k, table=self.to_table(max_players))

    def __eq__(self, other):
        """Games are equal when they assign the same worth to every coalition."""
        if not isinstance(other, Game):
            return NotImplemented
        if self.k != other.k:
            return False
        if self.is_weighted and other.is_weighted and (self.weights, self.quota) == (other.weights, other.quota):
            return True
        return bool(np.array_equal(self.to_table(), other.to_table()))

    __hash__ = None

    def __repr__(self):
        if self.is_weighted:
            return f"Game(k={self.k}, weights={list(self.weights)}, quota={self.quota})"
        return f"Game(k={self.k}, table)"


def table_game(values: Sequence[float]) -> Game:
    values = np.asarray(values, dtype=np.float64)
    k = int(len(values)).bit_length() - 1
    if len(values) != 1 << k or k < 1:
        raise InvalidGame(f"table length {len(values)} is not 2**k for k >= 1")
    return Game(k, table=values)


def weighted_majority(weights: Sequence[float], quota: float) -> Game:
    return Game(len(weights), weights=tuple(weights), quota=quota)


def evaluate(g: Game, coalition: Iterable[int]) -> float:
    coalition = list(coalition)
    if any(not 0 <= int(i) < g.k for i in coalition):
        raise InvalidGame(f"coalition {coalition} is not a subset of 0..{g.k - 1}")
    return g.value(mask_of(coalition))


def is_monotone(g: Game, max_players: int | None = None) -> bool:
    table = g.to_table(max_players)
    masks = np.arange(1 << g.k, dtype=np.int64)
    for l in range(g.k):
        without = masks[(masks >> l & 1) == 0]
        if (table[without | (1 << l)] < table[without]).any():
            return False
    return True


def is_simple(g: Game, max_players: int | None = None) -> bool:
    """Monotone, 0/1-valued, and the grand coalition wins."""
    table = g.to_table(max_players)
    if not np.isin(table, (0.0, 1.0)).all():
        return False
    return table[-1] == 1.0 and is_monotone(g, max_players)


def profile_masks(profiles: np.ndarray) -> np.ndarray:
    """Coalition mask of each binary profile (bit ``l`` = feature ``l``)."""
    k = profiles.shape[1]
    weights = np.left_shift(np.int64(1), np.arange(k, dtype=np.int64))
    return profiles.astype(np.int64) @ weights


def game_from_sample(d: Dataset) -> Game:
    """The game whose worth of ``R`` is the response of the profile with support ``R``."""
    if not d.space.is_binary or d.space.response_states != 2:
        raise NonBinary("game_from_sample needs binary features and a binary response")
    if d.k > MAX_MASK_PLAYERS:
        raise EnumerationBoundExceeded(f"{d.k} features")
    if d.n != 1 << d.k:
        raise IncompleteCoverage(f"{d.n} distinct profiles, {1 << d.k} required")
    table = np.zeros(1 << d.k, dtype=np.float64)
    table[profile_masks(d.profiles)] = d.y
    if table[0] != 0:
        raise NonZeroEmpty("the all-zeros profile is labelled 1, so v(empty) != 0")
    return Game(d.k, table=table)


def sample_from_game(g: Game, names: Sequence[str] | None = None, max_players: int | None = None) -> Dataset:
    """Full-coverage binary dataset labelled by the game; inverse of :func:`game_from_sample`.

    Rows are ordered as bit strings with feature 0 most significant.
    """
    check_bound(g.k, max_players)
    profiles = full_binary_profiles(g.k)
    y = g.values(profile_masks(profiles))
    if not np.isin(y, (0.0, 1.0)).all():
        raise NonBinary("only 0/1-valued games correspond to binary samples")
    return Dataset(FeatureSpace.binary(g.k, names), profiles, y.astype(np.int64))
