"""Bundled reference data.

``example_dataset`` is the four-feature sample whose response is 1 on
the profiles 0011, 1110, 1011, 0111 and 1111 (bit strings read as
``X_1 X_2 X_3 X_4``); it is the weighted majority game with weights
(1, 1, 4, 3) and quota 6.  ``TABLE4`` lists its Banzhaf-Owen values
for all fifteen partitions of four features (1-based blocks).

``synthetic_crash_dataset`` generates a 17,565-row binary sample with
the column layout of the binarized car-crash data (ten features and a
``y_pred`` column, 777 positive predictions).  Its values are synthetic.
"""

from __future__ import annotations

import numpy as np

from .dataset import Dataset, FeatureSpace, dataset_from_rule
from .games import Game, weighted_majority
from .partition import Partition

EXAMPLE_WINNERS = ("0011", "1110", "1011", "0111", "1111")
EXAMPLE_WEIGHTS = (1, 1, 4, 3)
EXAMPLE_QUOTA = 6

TABLE4: list[tuple[list[list[int]], tuple[float, float, float, float]]] = [
    ([[1], [2], [3], [4]], (0.125, 0.125, 0.625, 0.375)),
    ([[1], [2], [3, 4]], (0.000, 0.000, 0.625, 0.375)),
    ([[1], [3], [2, 4]], (0.000, 0.125, 0.500, 0.375)),
    ([[1], [4], [2, 3]], (0.250, 0.125, 0.625, 0.250)),
    ([[2], [3], [1, 4]], (0.125, 0.000, 0.500, 0.375)),
    ([[2], [4], [1, 3]], (0.125, 0.250, 0.625, 0.250)),
    ([[3], [4], [1, 2]], (0.125, 0.125, 0.750, 0.250)),
    ([[1, 2], [3, 4]], (0.000, 0.000, 0.750, 0.250)),
    ([[1, 3], [2, 4]], (0.000, 0.250, 0.500, 0.250)),
    ([[1, 4], [2, 3]], (0.250, 0.000, 0.500, 0.250)),
    ([[1], [2, 3, 4]], (0.000, 0.125, 0.625, 0.375)),
    ([[2], [1, 3, 4]], (0.125, 0.000, 0.625, 0.375)),
    ([[3], [1, 2, 4]], (0.125, 0.125, 0.500, 0.375)),
    ([[4], [1, 2, 3]], (0.125, 0.125, 0.625, 0.000)),
    ([[1, 2, 3, 4]], (0.125, 0.125, 0.625, 0.375)),
]


def table4_partition(scenario: int) -> Partition:
    """Zero-based partition of a scenario numbered 1..15."""
    blocks, _ = TABLE4[scenario - 1]
    return Partition(tuple(tuple(i - 1 for i in b) for b in blocks))


def example_dataset() -> Dataset:
    return dataset_from_rule(4, EXAMPLE_WINNERS, names=["X1", "X2", "X3", "X4"])


def example_game() -> Game:
    return weighted_majority(EXAMPLE_WEIGHTS, EXAMPLE_QUOTA)


CRASH_FEATURES = (
    "dvcat", "airbag", "seatbelt", "frontal", "sex",
    "abcat", "occRole", "deploy", "ageOFocc", "age",
)
CRASH_ROWS = 17_565
CRASH_POSITIVES = 777

# Prevalence of each binary feature and the coefficients of the synthetic
# scoring rule that labels profiles.
_CRASH_PREVALENCE = (0.35, 0.6, 0.7, 0.6, 0.55, 0.45, 0.8, 0.45, 0.35, 0.4)
_CRASH_SCORE = (2.2, -0.3, -1.6, -0.9, 0.2, -0.5, 0.0, -0.6, -0.7, 0.4)
# A second, smoother rule standing in for another classifier.
_CRASH_SCORE_ALT = (1.9, -0.2, -1.2, -1.1, 0.1, -0.7, 0.0, -0.3, -0.9, 0.6)


def _crash_score(profiles: np.ndarray) -> np.ndarray:
    # occRole has coefficient 0 and never enters the rule.
    return profiles @ np.asarray(_CRASH_SCORE)


def synthetic_crash_dataset(seed: int = 2024) -> tuple[list[str], np.ndarray]:
    """Header and raw row matrix (features then ``y_pred``), duplicates kept.

    Profiles are drawn feature-wise from fixed prevalences, with
    ``abcat`` and ``deploy`` tied to ``airbag``.  A profile is predicted
    positive when its score exceeds a threshold, and rows are sampled
    from the two predicted classes to reach exactly 777 positives.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    pool = 4 * CRASH_ROWS
    profiles = (rng.random((pool, len(CRASH_FEATURES))) < np.asarray(_CRASH_PREVALENCE)).astype(np.int64)
    airbag = profiles[:, 1]
    profiles[:, 5] &= airbag
    profiles[:, 7] = np.where(rng.random(pool) < 0.9, airbag, profiles[:, 7])
    label = (_crash_score(profiles) > 0.0).astype(np.int64)
    pos = np.flatnonzero(label == 1)
    neg = np.flatnonzero(label == 0)
    chosen = np.concatenate([
        rng.choice(pos, size=CRASH_POSITIVES, replace=False),
        rng.choice(neg, size=CRASH_ROWS - CRASH_POSITIVES, replace=False),
    ])
    chosen.sort()
    rows = np.column_stack([profiles[chosen], label[chosen]])
    return list(CRASH_FEATURES) + ["y_pred"], rows


def alternative_predictions(profiles: np.ndarray) -> np.ndarray:
    return (profiles @ np.asarray(_CRASH_SCORE_ALT) > 0.2).astype(np.int64)


def write_synthetic_crash_csv(path, seed: int = 2024, alt_path=None) -> None:
    """Write the synthetic sample; ``alt_path`` also gets a one-column file
    of predictions from the alternative rule."""
    header, rows = synthetic_crash_dataset(seed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows.tolist():
            fh.write(",".join(map(str, row)) + "\n")
    if alt_path is not None:
        alt = alternative_predictions(rows[:, :-1])
        with open(alt_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("y_pred_alt\n")
            fh.writelines(f"{v}\n" for v in alt.tolist())
