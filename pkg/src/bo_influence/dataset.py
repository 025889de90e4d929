"""Feature spaces, samples of classified profiles and their transformations.

A :class:`Dataset` holds distinct feature profiles (rows of integer state
codes) together with the response predicted for each profile and an
absolute frequency per profile.  Repeated profiles in an input file are
merged into the frequency column; a profile observed with two different
predicted responses is rejected.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ConflictingLabel,
    EmptyDataset,
    InsufficientClassMass,
    NonBinaryResponse,
    NotABijection,
    ParseError,
    ValidationError,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FeatureSpace:
    """Feature names, per-feature alphabet sizes and the response alphabet size."""

    names: tuple[str, ...]
    state_counts: tuple[int, ...]
    response_states: int = 2

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))
        object.__setattr__(self, "state_counts", tuple(int(c) for c in self.state_counts))
        if not self.names:
            raise ValidationError("a feature space needs at least one feature")
        if len(self.names) != len(self.state_counts):
            raise ValidationError("names and state_counts differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValidationError("feature names must be unique")
        if any(c < 2 for c in self.state_counts):
            raise ValidationError("every feature needs at least two states")
        if self.response_states < 2:
            raise ValidationError("the response needs at least two states")

    @property
    def k(self) -> int:
        return len(self.names)

    @property
    def is_binary(self) -> bool:
        return all(c == 2 for c in self.state_counts)

    @classmethod
    def binary(cls, k: int, names: Sequence[str] | None = None) -> FeatureSpace:
        if names is None:
            names = [f"feature_{i}" for i in range(k)]
        return cls(tuple(names), (2,) * k, 2)

    def index_of(self, name_or_index) -> int:
        if isinstance(name_or_index, (int, np.integer)) and not isinstance(name_or_index, bool):
            idx = int(name_or_index)
            if not 0 <= idx < self.k:
                raise IndexError(idx)
            return idx
        return self.names.index(str(name_or_index))


@dataclass(frozen=True, eq=False)
class Dataset:
    """A sample of distinct profiles with predicted responses and frequencies.

    ``profiles`` is an ``(n, k)`` integer array, ``y`` and ``freq`` have
    length ``n``.  Arrays are made read-only on construction.  ``codes``
    records string labels for columns that were dictionary-encoded on
    ingestion; it does not take part in equality.
    """

    space: FeatureSpace
    profiles: np.ndarray
    y: np.ndarray
    freq: np.ndarray = None
    codes: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        profiles = np.asarray(self.profiles, dtype=np.int64)
        if profiles.ndim == 1 and profiles.size == 0:
            profiles = profiles.reshape(0, self.space.k)
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        freq = np.ones(len(y), dtype=np.int64) if self.freq is None else np.asarray(self.freq, dtype=np.int64).reshape(-1)
        if profiles.ndim != 2 or profiles.shape[1] != self.space.k:
            raise ValidationError(f"profiles must have shape (n, {self.space.k})")
        if not (len(profiles) == len(y) == len(freq)):
            raise ValidationError("profiles, y and freq differ in length")
        if len(profiles):
            bounds = np.asarray(self.space.state_counts)
            if (profiles < 0).any() or (profiles >= bounds).any():
                raise ValidationError("profile state code outside its feature alphabet")
            if (y < 0).any() or (y >= self.space.response_states).any():
                raise ValidationError("response code outside the response alphabet")
            if (freq < 1).any():
                raise ValidationError("frequencies must be positive")
            if len(np.unique(profiles, axis=0)) != len(profiles):
                raise ValidationError("profiles must be pairwise distinct; use Dataset.from_records to merge")
        object.__setattr__(self, "profiles", _frozen(profiles))
        object.__setattr__(self, "y", _frozen(y))
        object.__setattr__(self, "freq", _frozen(freq))
        object.__setattr__(self, "codes", dict(self.codes))

    @classmethod
    def from_records(
        cls,
        space: FeatureSpace,
        profiles,
        y,
        freq=None,
        codes: Mapping[str, tuple[str, ...]] | None = None,
    ) -> Dataset:
        """Build a dataset, merging repeated profiles into frequency counts.

        Rows keep the order of first appearance.  Raises
        :class:`ConflictingLabel` if a profile occurs with two responses.
        """
        profiles = np.asarray(profiles, dtype=np.int64).reshape(-1, space.k)
        y = np.asarray(y, dtype=np.int64).reshape(-1)
        freq = np.ones(len(y), dtype=np.int64) if freq is None else np.asarray(freq, dtype=np.int64)
        first: dict[tuple[int, ...], int] = {}
        keep: list[int] = []
        counts: list[int] = []
        for i, row in enumerate(map(tuple, profiles.tolist())):
            j = first.get(row)
            if j is None:
                first[row] = len(keep)
                keep.append(i)
                counts.append(int(freq[i]))
                continue
            if y[keep[j]] != y[i]:
                raise ConflictingLabel(f"profile {row} has responses {y[keep[j]]} and {y[i]}")
            counts[j] += int(freq[i])
        return cls(space, profiles[keep], y[keep], np.asarray(counts, dtype=np.int64), codes or {})

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def k(self) -> int:
        return self.space.k

    @property
    def mass(self) -> int:
        return int(self.freq.sum())

    @property
    def rows(self) -> list[tuple[tuple[int, ...], int]]:
        return [(tuple(p), int(v)) for p, v in zip(self.profiles.tolist(), self.y.tolist())]

    def take(self, index) -> Dataset:
        """Subset of rows (boolean mask or index array), order preserved."""
        return Dataset(self.space, self.profiles[index], self.y[index], self.freq[index], self.codes)

    def with_freq(self, freq) -> Dataset:
        return Dataset(self.space, self.profiles, self.y, freq, self.codes)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.space.state_counts == other.space.state_counts
            and self.space.response_states == other.space.response_states
            and np.array_equal(self.profiles, other.profiles)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.freq, other.freq)
        )

    __hash__ = None

    def __repr__(self):
        return f"Dataset(k={self.k}, n={self.n}, mass={self.mass})"


@dataclass(frozen=True)
class WLView:
    """Row indices split by predicted response: ``W`` (y=1) and ``L`` (y=0)."""

    W: frozenset[int]
    L: frozenset[int]


@dataclass(frozen=True)
class Schema:
    """Column roles for :func:`load_dataset`.

    ``features`` defaults to every column other than the response and
    frequency columns, in header order.  ``state_counts`` overrides the
    inferred alphabet sizes by feature name.  With ``categorical`` set,
    non-integer columns are dictionary-encoded (sorted labels get codes
    0, 1, ...) instead of raising :class:`ParseError`.
    """

    response: str = "y"
    features: tuple[str, ...] | None = None
    freq: str | None = None
    state_counts: Mapping[str, int] | None = None
    categorical: bool = False


CANONICAL_SCHEMA = Schema(response="y", freq="freq")


def _parse_int(cell: str, where: str) -> int:
    try:
        value = int(cell.strip())
    except ValueError:
        raise ParseError(f"{where}: cannot parse {cell!r} as a state code") from None
    if value < 0:
        raise ParseError(f"{where}: negative state code {value}")
    return value


def _encode_column(name: str, cells: list[str], categorical: bool) -> tuple[list[int], tuple[str, ...] | None]:
    values = []
    for c in cells:
        try:
            values.append(int(c.strip()))
        except ValueError:
            if not categorical:
                raise ParseError(f"column {name!r}: cannot parse {c!r} as a state code") from None
            labels = tuple(sorted({c.strip() for c in cells}))
            lookup = {label: code for code, label in enumerate(labels)}
            return [lookup[c.strip()] for c in cells], labels
    if any(v < 0 for v in values):
        raise ParseError(f"column {name!r}: negative state code")
    return values, None


def _read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyDataset(f"{path}: no header") from None
        body = [row for row in reader if row and any(c.strip() for c in row)]
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
    return header, body


def load_dataset(csv_path, schema: Schema | None = None, predictions=None) -> Dataset:
    """Read a CSV of profiles and predicted responses.

    If ``predictions`` is given it names a single-column CSV (with header)
    holding the response for each data row; a ``schema.response`` column in
    the data file is then ignored.
    """
    schema = schema or Schema()
    path = Path(csv_path)
    header, body = _read_table(path)
    if not body:
        raise EmptyDataset(f"{path}: no data rows")
    columns = {name: [row[i] for row in body] for i, name in enumerate(header)}

    if predictions is not None:
        p_header, p_body = _read_table(Path(predictions))
        if len(p_header) != 1:
            raise ParseError(f"{predictions}: expected a single prediction column")
        if len(p_body) != len(body):
            raise ParseError(f"{predictions}: {len(p_body)} predictions for {len(body)} rows")
        response_cells = [r[0] for r in p_body]
    else:
        if schema.response not in columns:
            raise ParseError(f"{path}: missing response column {schema.response!r}")
        response_cells = columns[schema.response]

    if schema.features is not None:
        missing = [f for f in schema.features if f not in columns]
        if missing:
            raise ParseError(f"{path}: missing feature columns {missing}")
        feature_names = list(schema.features)
    else:
        feature_names = [h for h in header if h not in (schema.response, schema.freq)]
    if not feature_names:
        raise ParseError(f"{path}: no feature columns")

    codes: dict[str, tuple[str, ...]] = {}
    matrix = []
    for name in feature_names:
        values, labels = _encode_column(name, columns[name], schema.categorical)
        if labels is not None:
            codes[name] = labels
        matrix.append(values)
    y, labels = _encode_column(schema.response, response_cells, schema.categorical)
    if labels is not None:
        codes[schema.response] = labels
    freq = None
    if schema.freq is not None:
        if schema.freq not in columns:
            raise ParseError(f"{path}: missing frequency column {schema.freq!r}")
        freq = [_parse_int(c, f"column {schema.freq!r}") for c in columns[schema.freq]]
        if any(f < 1 for f in freq):
            raise ParseError(f"{path}: frequencies must be positive")

    profiles = np.asarray(matrix, dtype=np.int64).T
    overrides = dict(schema.state_counts or {})
    state_counts = []
    for j, name in enumerate(feature_names):
        inferred = max(2, int(profiles[:, j].max()) + 1)
        count = int(overrides.get(name, inferred))
        if count < inferred:
            raise ParseError(f"column {name!r}: state code {inferred - 1} exceeds declared count {count}")
        state_counts.append(count)
    response_states = max(2, max(y) + 1)
    space = FeatureSpace(tuple(feature_names), tuple(state_counts), response_states)
    return Dataset.from_records(space, profiles, y, freq, codes)


def read_canonical(csv_path) -> Dataset:
    """Load a file written by :func:`dump_dataset`."""
    return load_dataset(csv_path, CANONICAL_SCHEMA)


def write_canonical(d: Dataset, fh) -> None:
    """Write the canonical dump ``feature_0..feature_{k-1}, y, freq`` to a text stream."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([f"feature_{i}" for i in range(d.k)] + ["y", "freq"])
    for p, y, f in zip(d.profiles.tolist(), d.y.tolist(), d.freq.tolist()):
        writer.writerow(p + [y, f])


def dump_dataset(d: Dataset, csv_path) -> None:
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        write_canonical(d, fh)


def require_binary_response(d: Dataset) -> None:
    if d.space.response_states != 2:
        raise NonBinaryResponse(f"response has {d.space.response_states} states; only binary responses are supported")


def wl_view(d: Dataset) -> WLView:
    require_binary_response(d)
    idx = np.arange(d.n)
    return WLView(frozenset(idx[d.y == 1].tolist()), frozenset(idx[d.y == 0].tolist()))


def balanced_subsample(d: Dataset, per_class: int, seed: int) -> Dataset:
    """Draw ``per_class`` units of mass from each response class.

    Every row contributes ``freq`` units; units are drawn without
    replacement with ``numpy.random.Generator(PCG64(seed))`` (class 0
    first, then class 1) and the drawn units are folded back into
    frequency counts.  Rows keep their original order.
    """
    require_binary_response(d)
    if per_class < 0:
        raise ValidationError("per_class must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    counts = np.zeros(d.n, dtype=np.int64)
    for label in (0, 1):
        rows = np.flatnonzero(d.y == label)
        units = np.repeat(rows, d.freq[rows])
        if len(units) < per_class:
            raise InsufficientClassMass(f"class {label} has mass {len(units)} < {per_class}")
        drawn = rng.choice(len(units), size=per_class, replace=False)
        np.add.at(counts, units[drawn], 1)
    keep = counts > 0
    return Dataset(d.space, d.profiles[keep], d.y[keep], counts[keep], d.codes)


def _check_bijection(mapping: Sequence[int], size: int, what: str) -> list[int]:
    mapping = [int(v) for v in mapping]
    if len(mapping) != size or sorted(mapping) != list(range(size)):
        raise NotABijection(f"{what} is not a bijection on 0..{size - 1}: {mapping}")
    return mapping


def relabel_states(d: Dataset, l: int, tau: Sequence[int]) -> Dataset:
    """Map every state code of feature ``l`` through the bijection ``tau``."""
    tau = np.asarray(_check_bijection(tau, d.space.state_counts[l], "tau"), dtype=np.int64)
    profiles = d.profiles.copy()
    profiles[:, l] = tau[profiles[:, l]]
    return Dataset(d.space, profiles, d.y, d.freq, d.codes)


def permute_features(d: Dataset, sigma: Sequence[int]) -> Dataset:
    """Move column ``l`` to column ``sigma[l]``; names and alphabets follow."""
    sigma = _check_bijection(sigma, d.k, "sigma")
    profiles = np.empty_like(d.profiles)
    names = [""] * d.k
    counts = [0] * d.k
    for src, dst in enumerate(sigma):
        profiles[:, dst] = d.profiles[:, src]
        names[dst] = d.space.names[src]
        counts[dst] = d.space.state_counts[src]
    space = FeatureSpace(tuple(names), tuple(counts), d.space.response_states)
    return Dataset(space, profiles, d.y, d.freq, d.codes)


def full_binary_profiles(k: int) -> np.ndarray:
    """All ``2**k`` binary profiles, feature 0 as the most significant bit.

    Row ``r`` is the binary expansion of ``r``, so the row order matches
    reading profiles as bit strings ``X_1 X_2 ... X_k``.
    """
    r = np.arange(1 << k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return (r[:, None] >> shifts[None, :]) & 1


def dataset_from_rule(k: int, rule: Iterable[str], names: Sequence[str] | None = None) -> Dataset:
    """Full binary dataset whose response is 1 exactly on the listed bit strings."""
    winners = {s.strip() for s in rule}
    if any(len(s) != k or set(s) - {"0", "1"} for s in winners):
        raise ValidationError(f"rule entries must be {k}-character bit strings")
    profiles = full_binary_profiles(k)
    y = [1 if "".join(map(str, p)) in winners else 0 for p in profiles.tolist()]
    return Dataset(FeatureSpace.binary(k, names), profiles, y)
