"""Brute-force reference implementations, for tests only.

These follow the defining sums literally with plain Python loops and
sets.  They deliberately avoid the grouping and mask enumeration used by
the production modules so agreement between the two is evidence.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

from .dataset import Dataset, FeatureSpace, require_binary_response
from .errors import EnumerationBoundExceeded
from .games import Game
from .indices import IndexVector
from .measures import InfluenceReport
from .partition import DependencyModel, Partition, singleton_partition

ORACLE_MAX_PLAYERS = 16


def chi_naive(d: Dataset) -> InfluenceReport:
    require_binary_response(d)
    rows = d.rows
    raw = []
    for l in range(d.k):
        total = 0
        for xi, yi in rows:
            for xj, yj in rows:
                if all(xi[q] == xj[q] for q in range(d.k) if q != l):
                    total += abs(yi - yj)
        raw.append(total)
    return InfluenceReport(tuple(raw), "chi", singleton_partition(d.k), d.space.names)


def weighted_pairs_naive(d: Dataset, l: int) -> int:
    """Sum of ``n(i) * |y_i - y_j|`` over ordered pairs agreeing off ``l``."""
    total = 0
    rows = list(zip(d.profiles.tolist(), d.y.tolist(), d.freq.tolist()))
    for xi, yi, ni in rows:
        for xj, yj, _ in rows:
            if xi[:l] + xi[l + 1:] == xj[:l] + xj[l + 1:]:
                total += ni * abs(yi - yj)
    return total


def _worth(g: Game, coalition: set[int]) -> Fraction:
    if g.is_weighted:
        return Fraction(1 if sum(g.weights[i] for i in coalition) >= g.quota else 0)
    index = sum(2 ** i for i in coalition)
    return Fraction(g.table[index])


def _subsets(items):
    items = list(items)
    for size in range(len(items) + 1):
        yield from combinations(items, size)


def _vector(totals: list[Fraction], divisors: list[int], method: str, p=None) -> IndexVector:
    integral = all(t.denominator == 1 for t in totals)
    return IndexVector(
        values=tuple(float(t / dv) for t, dv in zip(totals, divisors)),
        method=method,
        swings=tuple(int(t) for t in totals) if integral else None,
        divisors=tuple(divisors),
        partition=p,
    )


def banzhaf_naive(g: Game) -> IndexVector:
    if g.k > ORACLE_MAX_PLAYERS:
        raise EnumerationBoundExceeded(f"oracle handles at most {ORACLE_MAX_PLAYERS} players")
    players = range(g.k)
    totals = []
    for l in players:
        total = Fraction(0)
        for others in _subsets(q for q in players if q != l):
            coalition = set(others)
            total += _worth(g, coalition | {l}) - _worth(g, coalition)
        totals.append(total)
    return _vector(totals, [2 ** (g.k - 1)] * g.k, "banzhaf")


def bo_naive(g: Game, p: Partition) -> IndexVector:
    if g.k > ORACLE_MAX_PLAYERS:
        raise EnumerationBoundExceeded(f"oracle handles at most {ORACLE_MAX_PLAYERS} players")
    totals, divisors = [0] * g.k, [0] * g.k
    for t, block in enumerate(p.blocks):
        other_blocks = [u for u in range(len(p.blocks)) if u != t]
        for l in block:
            total = Fraction(0)
            for chosen in _subsets(other_blocks):
                union = set()
                for u in chosen:
                    union |= set(p.blocks[u])
                for inner in _subsets(q for q in block if q != l):
                    coalition = union | set(inner)
                    total += _worth(g, coalition | {l}) - _worth(g, coalition)
            totals[l] = total
            divisors[l] = 2 ** (len(p.blocks) - 1) * 2 ** (len(block) - 1)
    return _vector(totals, divisors, "banzhaf-owen", p)


def _adheres(profile, p: Partition, dep: DependencyModel, t: int) -> bool:
    for u, block in enumerate(p.blocks):
        if u == t:
            continue
        rep = profile[block[0]]
        for q in block:
            expected = rep if dep.signs[q] == 1 else 1 - rep
            if profile[q] != expected:
                return False
    return True


def restricted_space_count_naive(space: FeatureSpace, p: Partition, dep: DependencyModel | None, t: int) -> int:
    dep = dep or DependencyModel.positive(space.k)
    alphabets = [range(c) for c in space.state_counts]
    return sum(1 for a in product(*alphabets) if _adheres(a, p, dep, t))


def restrict_sample_naive(d: Dataset, p: Partition, dep: DependencyModel | None, t: int) -> list[int]:
    """Row indices kept for block ``t``."""
    dep = dep or DependencyModel.positive(d.k)
    return [i for i, (x, _) in enumerate(d.rows) if _adheres(x, p, dep, t)]


def psi_naive(d: Dataset, p: Partition, dep: DependencyModel | None = None, weighted: bool = False) -> list[int]:
    out = [0] * d.k
    for t, block in enumerate(p.blocks):
        sub = d.take(restrict_sample_naive(d, p, dep, t))
        for l in block:
            if weighted:
                out[l] = weighted_pairs_naive(sub, l)
            else:
                out[l] = weighted_pairs_naive(sub.with_freq(None), l)
    return out
