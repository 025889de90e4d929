"""Banzhaf and Banzhaf-Owen power indices.

Exact values enumerate coalitions in mask order.  For games with integer
worths the marginal contributions are summed as integers (``swings``)
and divided once at the end, so results do not depend on summation
order or on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EnumerationBoundExceeded, NotAPartition
from .games import Game, check_bound
from .partition import Partition

# Largest number of coalitions enumerated per player by banzhaf_owen.
MAX_TERMS = 1 << 26
MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class IndexVector:
    values: tuple[float, ...]
    method: str
    stderr: tuple[float, ...] | None = None
    swings: tuple[int, ...] | None = None
    divisors: tuple[int, ...] | None = None
    partition: Partition | None = None
    n_samples: int | None = None

    def to_json(self) -> dict:
        out = {"method": self.method, "values": list(self.values)}
        if self.stderr is not None:
            out["stderr"] = [None if math.isnan(s) else s for s in self.stderr]
        if self.partition is not None:
            out["partition"] = self.partition.to_list()
        return out


def _is_integral(g: Game) -> bool:
    if g.is_weighted:
        return True
    return bool(np.all(g.table == np.round(g.table)))


def _map_players(fn: Callable[[int], tuple], k: int, workers: int) -> list[tuple]:
    if workers <= 1 or k == 1:
        return [fn(l) for l in range(k)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(k)))


def _unions(blocks: list[int]) -> np.ndarray:
    """OR of every subset of ``blocks`` (bit masks), indexed by subset mask."""
    out = np.zeros(1, dtype=np.int64)
    for b in blocks:
        out = np.concatenate([out, out | b])
    return out


def _marginals(g: Game, coalitions: np.ndarray, bit: int) -> np.ndarray:
    return g.values(coalitions | bit) - g.values(coalitions)


def _total(diff: np.ndarray, integral: bool):
    if integral:
        return int(np.rint(diff).astype(np.int64).sum())
    return math.fsum(diff.tolist())


def banzhaf(g: Game, max_players: int | None = None, workers: int = 1) -> IndexVector:
    """Average marginal contribution of each player over all coalitions of the others."""
    check_bound(g.k, max_players)
    integral = _is_integral(g)
    g = g.materialize(max_players)
    k = g.k
    r = np.arange(1 << (k - 1), dtype=np.int64)
    divisor = 1 << (k - 1)

    def player(l: int):
        low = (1 << l) - 1
        without = ((r & ~low) << 1) | (r & low)
        return _total(_marginals(g, without, 1 << l), integral)

    totals = _map_players(player, k, workers)
    return IndexVector(
        values=tuple(t / divisor for t in totals),
        method="banzhaf",
        swings=tuple(totals) if integral else None,
        divisors=(divisor,) * k,
    )


def _check_partition(g: Game, p: Partition) -> None:
    if not isinstance(p, Partition):
        raise NotAPartition("expected a Partition")
    if p.k != g.k:
        raise NotAPartition(f"partition covers {p.k} players, game has {g.k}")


def _block_masks(p: Partition) -> list[int]:
    return [sum(1 << i for i in b) for b in p.blocks]


def banzhaf_owen(g: Game, p: Partition, max_terms: int = MAX_TERMS, workers: int = 1) -> IndexVector:
    """Banzhaf-Owen value: marginal contributions over coalitions compatible with ``p``.

    For player ``l`` in block ``t`` the coalitions are unions of whole
    other blocks plus any subset of ``P_t \\ {l}``.  Weighted majority
    games are evaluated directly, so ``k`` is limited only by the number
    of compatible coalitions.
    """
    _check_partition(g, p)
    integral = _is_integral(g)
    block_masks = _block_masks(p)
    owner = p.block_index()
    m = p.m

    def player(l: int):
        t = owner[l]
        size = len(p.blocks[t])
        terms = 1 << (m - 1 + size - 1)
        if terms > max_terms:
            raise EnumerationBoundExceeded(f"player {l} needs {terms} coalitions (limit {max_terms})")
        outer = _unions([bm for u, bm in enumerate(block_masks) if u != t])
        inner = _unions([1 << q for q in p.blocks[t] if q != l])
        coalitions = (outer[:, None] | inner[None, :]).ravel()
        return _total(_marginals(g, coalitions, 1 << l), integral), terms

    results = _map_players(player, g.k, workers)
    totals = [r[0] for r in results]
    divisors = [r[1] for r in results]
    return IndexVector(
        values=tuple(t / d for t, d in zip(totals, divisors)),
        method="banzhaf-owen",
        swings=tuple(totals) if integral else None,
        divisors=tuple(divisors),
        partition=p,
    )


def banzhaf_owen_mc(g: Game, p: Partition, n_samples: int, seed: int, workers: int = 1) -> IndexVector:
    """Sampling estimate of the Banzhaf-Owen value.

    Each draw includes every other block and every other member of the
    player's own block independently with probability 1/2.  Player ``l``
    uses its own stream ``PCG64(SeedSequence(seed).spawn(k)[l])`` and bits
    are drawn in chunks of ``MC_CHUNK`` rows, so estimates depend only on
    ``seed`` and ``n_samples``.  ``stderr`` is the sample standard
    deviation over ``sqrt(n_samples)`` (NaN for a single sample).
    """
    _check_partition(g, p)
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    block_masks = _block_masks(p)
    owner = p.block_index()
    streams = np.random.SeedSequence(seed).spawn(g.k)

    def player(l: int):
        t = owner[l]
        pieces = [bm for u, bm in enumerate(block_masks) if u != t]
        pieces += [1 << q for q in p.blocks[t] if q != l]
        pieces = np.asarray(pieces, dtype=np.int64)
        rng = np.random.Generator(np.random.PCG64(streams[l]))
        total = 0.0
        total_sq = 0.0
        done = 0
        while done < n_samples:
            size = min(MC_CHUNK, n_samples - done)
            if len(pieces):
                bits = rng.integers(0, 2, size=(size, len(pieces)), dtype=np.int64)
                coalitions = bits @ pieces
            else:
                coalitions = np.zeros(size, dtype=np.int64)
            diff = _marginals(g, coalitions, 1 << l)
            total += math.fsum(diff.tolist())
            total_sq += math.fsum((diff * diff).tolist())
            done += size
        mean = total / n_samples
        if n_samples == 1:
            return mean, float("nan")
        var = max(total_sq - n_samples * mean * mean, 0.0) / (n_samples - 1)
        return mean, math.sqrt(var / n_samples)

    results = _map_players(player, g.k, workers)
    return IndexVector(
        values=tuple(r[0] for r in results),
        method="banzhaf-owen-mc",
        stderr=tuple(r[1] for r in results),
        partition=p,
        n_samples=n_samples,
    )
