"""Influence measures of features over a classified sample.

``chi`` counts ordered pairs of profiles that differ only in feature
``l`` and carry different predicted responses.  ``psi`` does the same
for each feature inside the subsample restricted for its union, and
``weighted_psi`` multiplies each pair by the frequency of its source
profile.  Raw values are integer pair counts (the scale constant is 1);
:func:`normalize` divides by the size of the restricted profile space,
which turns them into Banzhaf-Owen values on full-coverage samples.

Pair matching groups rows by their profile with coordinate ``l``
removed, so each feature costs one sort of the sample.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .dataset import Dataset, FeatureSpace, permute_features, relabel_states, require_binary_response
from .errors import ConstantVector, LengthMismatch, NonBinaryFeature, PreconditionUnmet
from .partition import (
    DependencyModel,
    Partition,
    adherence_mask,
    detach,
    restrict_sample,
    restricted_space_count,
    singleton_partition,
)


@dataclass(frozen=True)
class InfluenceReport:
    raw: tuple[int, ...]
    measure: str
    partition: Partition
    names: tuple[str, ...]
    dep: DependencyModel | None = None
    normalized: tuple[float, ...] | None = None
    space_counts: tuple[int, ...] | None = None
    constant_C: float = 1
    ranking: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(i for i, _ in _ordered(self.scores())))

    @property
    def k(self) -> int:
        return len(self.raw)

    def scores(self) -> tuple[float, ...]:
        """Normalized values when present, raw values otherwise."""
        return self.normalized if self.normalized is not None else tuple(float(v) for v in self.raw)


def _ordered(values: Sequence[float]) -> list[tuple[int, float]]:
    return sorted(enumerate(values), key=lambda iv: (-iv[1], iv[0]))


def _group_ids(profiles: np.ndarray, l: int) -> np.ndarray:
    rest = np.delete(profiles, l, axis=1)
    if rest.shape[1] == 0 or len(rest) == 0:
        return np.zeros(len(profiles), dtype=np.int64)
    _, inverse = np.unique(rest, axis=0, return_inverse=True)
    return inverse.reshape(-1)


def pair_count(profiles: np.ndarray, y: np.ndarray, weights: np.ndarray | None, l: int) -> int:
    """Sum over rows i of ``weight(i)`` times the number of rows j that differ
    from i only in coordinate ``l`` and have the other response."""
    if len(y) == 0:
        return 0
    groups = _group_ids(profiles, l)
    size = int(groups.max()) + 1
    ones = np.bincount(groups, weights=y, minlength=size).astype(np.int64)
    zeros = np.bincount(groups, minlength=size).astype(np.int64) - ones
    partners = np.where(y == 1, zeros[groups], ones[groups])
    if weights is None:
        return int(partners.sum())
    return int((weights * partners).sum())


def _report(d: Dataset, raw, measure: str, p: Partition, dep: DependencyModel | None) -> InfluenceReport:
    return InfluenceReport(tuple(int(v) for v in raw), measure, p, d.space.names, dep)


def chi(d: Dataset) -> InfluenceReport:
    require_binary_response(d)
    raw = [pair_count(d.profiles, d.y, None, l) for l in range(d.k)]
    return _report(d, raw, "chi", singleton_partition(d.k), None)


def _restricted_counts(d: Dataset, p: Partition, dep: DependencyModel | None, weighted: bool) -> list[int]:
    require_binary_response(d)
    raw = [0] * d.k
    for t, block in enumerate(p.blocks):
        keep = adherence_mask(d, p, dep, t)
        profiles, y = d.profiles[keep], d.y[keep]
        weights = d.freq[keep] if weighted else None
        for l in block:
            raw[l] = pair_count(profiles, y, weights, l)
    return raw


def psi(d: Dataset, p: Partition, dep: DependencyModel | None = None) -> InfluenceReport:
    """Pair counts of each feature inside the subsample restricted for its union."""
    dep = dep or DependencyModel.positive(d.k)
    return _report(d, _restricted_counts(d, p, dep, weighted=False), "psi", p, dep)


def weighted_psi(d: Dataset, p: Partition, dep: DependencyModel | None = None) -> InfluenceReport:
    """As :func:`psi`, with each ordered pair weighted by the source row's frequency."""
    dep = dep or DependencyModel.positive(d.k)
    return _report(d, _restricted_counts(d, p, dep, weighted=True), "weighted-psi", p, dep)


def normalize(
    r: InfluenceReport,
    space: FeatureSpace,
    p: Partition | None = None,
    dep: DependencyModel | None = None,
) -> InfluenceReport:
    """Divide each raw value by the size of its union's restricted profile space."""
    if not space.is_binary:
        raise NonBinaryFeature("normalization needs binary features")
    p = p or r.partition
    dep = dep or r.dep or DependencyModel.positive(space.k)
    counts = tuple(restricted_space_count(space, p, dep, t) for t in range(p.m))
    owner = p.block_index()
    normalized = tuple(v / counts[owner[l]] for l, v in enumerate(r.raw))
    return replace(r, normalized=normalized, space_counts=counts, partition=p, dep=dep)


def rank(r: InfluenceReport | Sequence[float], top_k: int | None = None) -> list[tuple[int, float]]:
    """Features by decreasing value, ties by increasing index."""
    values = r.scores() if isinstance(r, InfluenceReport) else list(r)
    ordered = _ordered(values)
    return ordered if top_k is None else ordered[: max(top_k, 0)]


def pearson(a: Sequence[float], b: Sequence[float]) -> float:
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    if len(a) != len(b):
        raise LengthMismatch(f"vectors of length {len(a)} and {len(b)}")
    if len(a) < 2:
        raise LengthMismatch("need at least two values")
    if len(set(a)) == 1 or len(set(b)) == 1:
        raise ConstantVector("correlation is undefined for a constant vector")
    return max(-1.0, min(1.0, statistics.correlation(a, b)))


# Axiom checks ----------------------------------------------------------------

AXIOMS = ("DP", "FSY", "SSY", "DU", "II", "RP")


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    passed: bool
    checked: int
    witness: dict | None = None

    def __bool__(self):
        return self.passed


def non_influential(d: Dataset, l: int) -> bool:
    """True when profiles agreeing off coordinate ``l`` always share a response."""
    groups = _group_ids(d.profiles, l)
    size = int(groups.max()) + 1 if len(groups) else 0
    ones = np.bincount(groups, weights=d.y, minlength=size)
    total = np.bincount(groups, minlength=size)
    return bool(((ones == 0) | (ones == total)).all())


def _labelled(d: Dataset, winners, losers) -> Dataset:
    rows = list(winners) + list(losers)
    y = [1] * len(winners) + [0] * len(losers)
    return Dataset(d.space, d.profiles[rows].reshape(-1, d.k), y, d.freq[rows])


def _require_singletons(p: Partition, axiom: str) -> None:
    if not p.is_singletons():
        raise PreconditionUnmet(f"{axiom} is stated for the all-singletons partition")


def _compare(axiom: str, pairs) -> AxiomResult:
    checked = 0
    for witness, lhs, rhs in pairs:
        checked += 1
        if lhs != rhs:
            return AxiomResult(axiom, False, checked, {**witness, "lhs": lhs, "rhs": rhs})
    return AxiomResult(axiom, True, checked)


def _rebased(dep: DependencyModel, p: Partition) -> DependencyModel:
    # Signs are relative to the block's lowest member; re-express them when
    # detaching the old representative left a negative one in charge.
    signs = list(dep.signs)
    for block in p.blocks:
        if signs[block[0]] == -1:
            for q in block:
                signs[q] = -signs[q]
    return DependencyModel(tuple(signs))


def axiom_check(
    d: Dataset,
    p: Partition,
    dep: DependencyModel | None,
    axiom: str,
    *,
    sigma: Sequence[int] | None = None,
    feature: int | None = None,
    tau: Sequence[int] | None = None,
    split: tuple[Sequence[int], Sequence[int], Sequence[int]] | None = None,
    pairs: Sequence[tuple[int, int]] | None = None,
) -> AxiomResult:
    """Evaluate both sides of an axiom on concrete inputs and compare exactly.

    Optional arguments pick the instance: ``sigma`` (FSY, default reversal),
    ``feature``/``tau`` (SSY, default feature 0 with a cyclic shift),
    ``split`` as row indices ``(Q, R, R')`` (DU, default winners against
    the losers split by parity of position), ``pairs`` as ``(l, q)`` (II,
    default every ordered pair inside every union).  On failure the result
    carries the first offending case.
    """
    dep = dep or DependencyModel.positive(d.k)
    if axiom == "DP":
        psi_raw = psi(d, p, dep).raw
        w_raw = weighted_psi(d, p, dep).raw
        chi_raw = chi(d).raw
        cases = []
        for l in range(d.k):
            if non_influential(d, l):
                cases += [({"feature": l, "measure": name}, vals[l], 0) for name, vals in
                          (("chi", chi_raw), ("psi", psi_raw), ("weighted-psi", w_raw))]
        return _compare(axiom, cases)

    if axiom == "FSY":
        _require_singletons(p, axiom)
        sigma = list(sigma) if sigma is not None else list(range(d.k))[::-1]
        before = chi(d).raw
        after = chi(permute_features(d, sigma)).raw
        return _compare(axiom, (({"feature": l, "sigma": sigma}, before[l], after[sigma[l]]) for l in range(d.k)))

    if axiom == "SSY":
        _require_singletons(p, axiom)
        feature = 0 if feature is None else feature
        size = d.space.state_counts[feature]
        tau = list(tau) if tau is not None else [(a + 1) % size for a in range(size)]
        before = chi(d).raw
        after = chi(relabel_states(d, feature, tau)).raw
        return _compare(axiom, (({"feature": q, "relabelled": feature, "tau": tau}, before[q], after[q]) for q in range(d.k)))

    if axiom == "DU":
        require_binary_response(d)
        if split is None:
            losers = sorted(np.flatnonzero(d.y == 0).tolist())
            split = (np.flatnonzero(d.y == 1).tolist(), losers[0::2], losers[1::2])
        q_rows, r_rows, r2_rows = (list(s) for s in split)
        if len(set(q_rows) | set(r_rows) | set(r2_rows)) != len(q_rows) + len(r_rows) + len(r2_rows):
            raise PreconditionUnmet("Q, R and R' must be pairwise disjoint")
        cases = []
        for name, measure in (("chi", lambda x: chi(x).raw), ("psi", lambda x: psi(x, p, dep).raw)):
            for orient in ("QR", "RQ"):
                def side(a, b):
                    return measure(_labelled(d, a, b) if orient == "QR" else _labelled(d, b, a))
                lhs_a, lhs_b = side(q_rows, r_rows), side(q_rows, r2_rows)
                rhs = side(q_rows, r_rows + r2_rows)
                cases += [({"feature": l, "measure": name, "orientation": orient}, lhs_a[l] + lhs_b[l], rhs[l])
                          for l in range(d.k)]
        return _compare(axiom, cases)

    if axiom == "II":
        if pairs is None:
            pairs = [(l, q) for b in p.blocks if len(b) > 1 for l in b for q in b if l != q]
        if not pairs:
            raise PreconditionUnmet("II needs a union with at least two features")
        base = psi(d, p, dep).raw
        cases = []
        for l, q in pairs:
            if l == q or p.block_of(l) != p.block_of(q):
                raise PreconditionUnmet(f"features {l} and {q} must be distinct members of one union")
            p2 = detach(p, q)
            cases.append(({"feature": l, "detached": q}, base[l], psi(d, p2, _rebased(dep, p2)).raw[l]))
        return _compare(axiom, cases)

    if axiom == "RP":
        singles = [t for t, b in enumerate(p.blocks) if len(b) == 1]
        if not singles:
            raise PreconditionUnmet("RP needs a singleton union")
        base = psi(d, p, dep).raw
        cases = []
        for t in singles:
            l = p.blocks[t][0]
            cases.append(({"feature": l}, base[l], chi(restrict_sample(d, p, dep, t)).raw[l]))
        return _compare(axiom, cases)

    raise ValueError(f"unknown axiom {axiom!r}; expected one of {AXIOMS}")
