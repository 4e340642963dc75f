"""Closed frequent pattern mining via prefix-preserving closure extension.

The miner enumerates exactly the closed frequent patterns (CFPs) of a dataset:
itemsets with support at or above a threshold and no strict superset of equal
support.  Starting from the empty pattern, closures of one-item extensions are
generated and kept only when they introduce no item below the extension point,
which guarantees each closed set is produced exactly once.

Output is canonically ordered: descending support, then descending length,
then descending lexicographic order of the item sequence.  That order is also
the candidate order consumed by code-table construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import backend
from .data import Dataset, Pattern, Transaction
from .errors import ContractError, ParameterError, ParseError, UndefinedClosureError

WHOLE_DATASET = "whole-dataset"

CEIL = "ceil"
FLOOR = "floor"

# Core index sentinel for the empty pattern: "before the first item".
EMPTY_CORE = -1


@dataclass(frozen=True)
class MinSup:
    """Support threshold, absolute or as a fraction of the dataset size.

    A non-integral value resolves to the smallest integer >= value by default
    ("support >= value" read over the reals); the ``floor`` convention is kept
    available because published counts sometimes assume it.
    """

    value: float | None = None
    fraction: float | None = None
    convention: str = CEIL

    def __post_init__(self):
        if (self.value is None) == (self.fraction is None):
            raise ParameterError("specify exactly one of value or fraction")
        if self.value is not None and self.value <= 0:
            raise ParameterError("minsup value must be positive")
        if self.fraction is not None and not 0 < self.fraction <= 1:
            raise ParameterError("minsup fraction must be in (0, 1]")
        if self.convention not in (CEIL, FLOOR):
            raise ParameterError(f"unknown minsup convention {self.convention!r}")

    @classmethod
    def absolute(cls, value: float, convention: str = CEIL) -> "MinSup":
        return cls(value=value, convention=convention)

    @classmethod
    def of_fraction(cls, fraction: float, convention: str = CEIL) -> "MinSup":
        return cls(fraction=fraction, convention=convention)

    def resolve(self, n_transactions: int) -> int:
        raw = self.value if self.value is not None else self.fraction * n_transactions
        t = math.ceil(raw) if self.convention == CEIL else math.floor(raw)
        if t < 1:
            raise ParameterError(f"effective minsup threshold {t} is below 1")
        return t


@dataclass
class CfpSet:
    """Closed frequent patterns of one mining run, canonically ordered."""

    patterns: list[Pattern]
    minsup_used: MinSup
    source: str = WHOLE_DATASET

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def itemsets(self) -> list[Transaction]:
        return [p.items for p in self.patterns]


def candidate_order_key(items: Sequence[int], support: int):
    """Sort key: support desc, length desc, lexicographic desc."""
    return (-support, -len(items), tuple(-i for i in items))


def closure(dataset: Dataset, items: Iterable[int]) -> Transaction:
    """Intersection of all transactions supporting ``items``.

    The result is the smallest closed superset and has the same support.
    Undefined (raises) when nothing supports the pattern.
    """
    pat = dataset.validate_pattern(items)
    supporters = dataset.supporting_transactions(pat)
    if not supporters:
        raise UndefinedClosureError(f"pattern {pat} has support 0; closure undefined")
    acc = set(dataset.transactions[supporters[0]])
    for j in supporters[1:]:
        acc.intersection_update(dataset.transactions[j])
        if len(acc) == len(pat):
            break
    return tuple(sorted(acc))


def is_closed(dataset: Dataset, items: Iterable[int]) -> bool:
    pat = dataset.validate_pattern(items)
    if not pat:
        return closure_of_empty(dataset) == ()
    return closure(dataset, pat) == pat


def closure_of_empty(dataset: Dataset) -> Transaction:
    """Items common to every transaction."""
    acc = set(dataset.transactions[0])
    for t in dataset.transactions[1:]:
        acc.intersection_update(t)
        if not acc:
            break
    return tuple(sorted(acc))


def core_index(dataset: Dataset, items: Iterable[int]) -> int:
    """Minimum item j of a closed pattern whose prefix up to j already pins
    the supporting set; EMPTY_CORE (-1) for the empty pattern."""
    pat = dataset.validate_pattern(items)
    if not pat:
        return EMPTY_CORE
    if closure(dataset, pat) != pat:
        raise ContractError(f"core_index requires a closed pattern, got {pat}")
    full = dataset.supporting_transactions(pat)
    for k in range(1, len(pat) + 1):
        if dataset.supporting_transactions(pat[:k]) == full:
            return pat[k - 1]
    raise AssertionError("unreachable: the full pattern always qualifies")


def ppc_extensions(dataset: Dataset, items: Iterable[int], minsup: MinSup) -> list[Pattern]:
    """Frequent prefix-preserving closure extensions of a closed pattern.

    Each result is the closure of ``items`` plus one item above the core
    index, kept when it introduces no item below the extension point and its
    support meets the threshold.
    """
    pat = dataset.validate_pattern(items)
    t = minsup.resolve(len(dataset))
    core = core_index(dataset, pat)
    pset = set(pat)
    out = []
    for i in range(core + 1, dataset.alphabet_size):
        if i in pset:
            continue
        cand = tuple(sorted(pset | {i}))
        sup = dataset.support(cand)
        if sup < t:
            continue
        q = closure(dataset, cand)
        if [x for x in q if x < i] != [x for x in pat if x < i]:
            continue
        out.append(Pattern(q, sup))
    out.sort(key=lambda p: candidate_order_key(p.items, p.support))
    return out


def mine_cfp(dataset: Dataset, minsup: MinSup, source: str = WHOLE_DATASET) -> CfpSet:
    """All closed frequent patterns of ``dataset`` at ``minsup``, canonical order."""
    t = minsup.resolve(len(dataset))
    found = backend.mine_closed(dataset.transactions, dataset.alphabet_size, t)
    patterns = [Pattern(items, sup) for items, sup in found]
    patterns.sort(key=lambda p: candidate_order_key(p.items, p.support))
    return CfpSet(patterns, minsup, source)


def write_cfp_file(cfps: CfpSet, path: str | Path) -> None:
    """One pattern per line: ``sup=<count>: <id id id...>`` in canonical order."""
    lines = [f"sup={p.support}: {' '.join(str(i) for i in p.items)}\n" for p in cfps.patterns]
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_cfp_file(path: str | Path, minsup: MinSup | None = None) -> CfpSet:
    patterns = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            head, rest = line.split(":", 1)
            sup = int(head.removeprefix("sup="))
            items = tuple(int(x) for x in rest.split())
        except ValueError as exc:
            raise ParseError(f"bad CFP line {line!r}", lineno) from exc
        patterns.append(Pattern(items, sup))
    return CfpSet(patterns, minsup if minsup is not None else MinSup.absolute(1))
