"""Seeded synthetic data with planted patterns.

Stands in for large private corpora in tests and demos: each class owns a few
disjoint planted itemsets, every transaction includes each of its class's
patterns independently with a fixed probability plus uniform noise items.
Ground truth is known, so classifier and anomaly-detector quality can be
checked without external data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .data import Dataset, Transaction
from .errors import ParameterError


@dataclass
class SynthSpec:
    alphabet_size: int = 200
    patterns_per_class: int = 5
    pattern_length: int = 8
    pattern_prob: float = 0.6
    noise_items: int = 10
    train_size: int = 2000
    test_size: int = 500
    seed: int = 7


@dataclass
class TwoClassData:
    train_1: Dataset
    train_2: Dataset
    test_1: Dataset
    test_2: Dataset
    planted_1: list[Transaction] = field(default_factory=list)
    planted_2: list[Transaction] = field(default_factory=list)


def _planted_patterns(spec: SynthSpec) -> tuple[list[Transaction], list[Transaction]]:
    """Disjoint planted patterns: class 1 then class 2 over consecutive items."""
    width = spec.patterns_per_class * spec.pattern_length
    if 2 * width + spec.noise_items > spec.alphabet_size:
        raise ParameterError(
            f"alphabet of {spec.alphabet_size} cannot hold 2x{width} disjoint "
            f"planted items plus {spec.noise_items} noise candidates"
        )
    p1 = [
        tuple(range(k * spec.pattern_length, (k + 1) * spec.pattern_length))
        for k in range(spec.patterns_per_class)
    ]
    p2 = [
        tuple(range(width + k * spec.pattern_length, width + (k + 1) * spec.pattern_length))
        for k in range(spec.patterns_per_class)
    ]
    return p1, p2


def _noise_range(spec: SynthSpec) -> range:
    """Items outside both classes' planted blocks.

    Keeping noise off the planted items stops noise collisions from
    manufacturing closed supersets of every planted-pattern fragment, which
    would explode the closed-set count at small thresholds.
    """
    return range(2 * spec.patterns_per_class * spec.pattern_length, spec.alphabet_size)


def _draw(rng: random.Random, planted: list[Transaction], spec: SynthSpec) -> Transaction:
    items: set[int] = set()
    for pat in planted:
        if rng.random() < spec.pattern_prob:
            items.update(pat)
    items.update(rng.sample(_noise_range(spec), spec.noise_items))
    return tuple(sorted(items))


def generate_two_class(spec: SynthSpec | None = None) -> TwoClassData:
    spec = spec or SynthSpec()
    rng = random.Random(spec.seed)
    p1, p2 = _planted_patterns(spec)
    m = spec.alphabet_size

    def block(planted, count):
        return Dataset([_draw(rng, planted, spec) for _ in range(count)], m)

    return TwoClassData(
        train_1=block(p1, spec.train_size),
        train_2=block(p2, spec.train_size),
        test_1=block(p1, spec.test_size),
        test_2=block(p2, spec.test_size),
        planted_1=p1,
        planted_2=p2,
    )


@dataclass
class AnomalyData:
    train_normal: Dataset
    test_normal: Dataset
    anomalies: Dataset


def generate_anomaly(
    spec: SynthSpec | None = None, anomaly_count: int = 200
) -> AnomalyData:
    """Planted-pattern normals plus uniform-random noise transactions.

    Noise transactions match the normals' typical item count but draw every
    item uniformly, so no planted pattern can compress them.
    """
    spec = spec or SynthSpec()
    rng = random.Random(spec.seed)
    p1, _ = _planted_patterns(spec)
    m = spec.alphabet_size
    typical = spec.noise_items + int(
        spec.patterns_per_class * spec.pattern_prob * spec.pattern_length
    )

    train = Dataset([_draw(rng, p1, spec) for _ in range(spec.train_size)], m)
    test = Dataset([_draw(rng, p1, spec) for _ in range(spec.test_size)], m)
    noise = Dataset(
        [tuple(sorted(rng.sample(range(m), typical))) for _ in range(anomaly_count)], m
    )  # anomalies draw across the whole alphabet: no planted structure
    return AnomalyData(train, test, noise)
