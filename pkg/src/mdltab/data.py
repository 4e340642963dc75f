"""Transactional datasets: items, transactions, loading and support algebra.

A dataset is a non-empty multiset of transactions over a dense item alphabet
``0..m-1``.  Transactions are stored as strictly ascending tuples of item ids
and, for alphabets up to ``BITSET_CUTOFF`` items, additionally as Python-int
bitmasks so subset and intersection tests run word-parallel.  Datasets are
immutable after construction and safe to share across threads.

Two external formats are supported:

* item-list: one transaction per line, decimal item ids separated by spaces,
  lines starting with ``#`` ignored, blank line = empty transaction.
* one-hot CSV: first row holds item names, following rows hold 0/1 cells;
  row i becomes transaction i.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DomainError, EmptyDatasetError, ParseError

Transaction = tuple[int, ...]

# Alphabets up to this size get per-transaction bitmask caches.
BITSET_CUTOFF = 4096

ITEM_LIST = "item-list"
ONE_HOT_CSV = "one-hot-csv"


@dataclass(frozen=True)
class Item:
    """An alphabet entry: dense id plus optional human-readable name."""

    id: int
    name: str | None = None

    def label(self) -> str:
        return self.name if self.name is not None else str(self.id)


@dataclass(frozen=True)
class Pattern:
    """An itemset, optionally annotated with its support in some dataset."""

    items: Transaction
    support: int | None = None

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, item: int) -> bool:
        return item in self.items


class Dataset:
    """Immutable multiset of transactions over a dense alphabet.

    Parameters
    ----------
    transactions : sequence of ascending int tuples
        Kept in the given order (``source_order``); duplicates are retained
        with multiplicity.
    alphabet_size : int
        Number of items ``m``; every transaction id must be ``< m``.
    item_names : optional list of str
        Human-readable labels, one per alphabet id.
    """

    def __init__(
        self,
        transactions: Sequence[Iterable[int]],
        alphabet_size: int,
        item_names: Sequence[str] | None = None,
    ):
        txs = [tuple(t) for t in transactions]
        if not txs:
            raise EmptyDatasetError("a dataset must contain at least one transaction")
        if alphabet_size < 1:
            raise DomainError("alphabet_size must be positive")
        for t in txs:
            _check_ascending(t, alphabet_size)
        if item_names is not None and len(item_names) != alphabet_size:
            raise DomainError("item_names length must equal alphabet_size")
        self.transactions: list[Transaction] = txs
        self.alphabet_size: int = alphabet_size
        self.item_names: list[str] | None = list(item_names) if item_names is not None else None
        self._masks: list[int] | None = None
        if alphabet_size <= BITSET_CUTOFF:
            self._masks = [_mask_of(t) for t in txs]

    def __len__(self) -> int:
        return len(self.transactions)

    def __iter__(self):
        return iter(self.transactions)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Dataset)
            and self.alphabet_size == other.alphabet_size
            and self.transactions == other.transactions
        )

    def item_label(self, item: int) -> str:
        if self.item_names is not None:
            return self.item_names[item]
        return str(item)

    def masks(self) -> list[int] | None:
        """Per-transaction bitmasks, or None above the bitset cutoff."""
        return self._masks

    def validate_pattern(self, items: Iterable[int]) -> Transaction:
        out = tuple(sorted(set(items)))
        for i in out:
            if not 0 <= i < self.alphabet_size:
                raise DomainError(f"item {i} outside alphabet 0..{self.alphabet_size - 1}")
        return out

    def support(self, items: Iterable[int]) -> int:
        """Number of transactions (with multiplicity) containing all of ``items``."""
        pat = self.validate_pattern(items)
        if not pat:
            return len(self.transactions)
        if self._masks is not None:
            pm = _mask_of(pat)
            return sum(1 for tm in self._masks if tm & pm == pm)
        ps = set(pat)
        return sum(1 for t in self.transactions if ps.issubset(t))

    def supporting_transactions(self, items: Iterable[int]) -> list[int]:
        """Indices (source order) of the transactions supporting ``items``."""
        pat = self.validate_pattern(items)
        if not pat:
            return list(range(len(self.transactions)))
        if self._masks is not None:
            pm = _mask_of(pat)
            return [j for j, tm in enumerate(self._masks) if tm & pm == pm]
        ps = set(pat)
        return [j for j, t in enumerate(self.transactions) if ps.issubset(t)]

    def subset(self, indices: Sequence[int]) -> "Dataset":
        """Sub-multiset over the same alphabet, in the given index order."""
        return Dataset(
            [self.transactions[j] for j in indices],
            self.alphabet_size,
            self.item_names,
        )

    def item_supports(self) -> list[int]:
        """Support of every singleton, indexed by item id."""
        counts = [0] * self.alphabet_size
        for t in self.transactions:
            for i in t:
                counts[i] += 1
        return counts


def _check_ascending(t: Sequence[int], m: int) -> None:
    prev = -1
    for i in t:
        if i <= prev:
            raise DomainError(f"transaction ids must be strictly ascending (got {i} after {prev})")
        if i >= m:
            raise DomainError(f"item id {i} outside alphabet 0..{m - 1}")
        prev = i


def _mask_of(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


def load_dataset(path: str | Path, format: str = ITEM_LIST) -> Dataset:
    """Load a dataset file.

    For item-list input the alphabet is ``max id + 1``; for one-hot CSV it is
    the column count.  Raises ParseError (with the offending line number) on
    malformed content and EmptyDatasetError when no transactions are present.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if format == ITEM_LIST:
        return _parse_item_list(text)
    if format == ONE_HOT_CSV:
        return _parse_one_hot(text)
    raise ParseError(f"unknown dataset format {format!r}")


def _parse_item_list(text: str) -> Dataset:
    transactions: list[Transaction] = []
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            transactions.append(())
            continue
        ids = []
        for tok in line.split():
            if not tok.isdigit():
                raise ParseError(f"non-numeric token {tok!r}", lineno)
            ids.append(int(tok))
        prev = -1
        for i in ids:
            if i == prev:
                raise ParseError(f"duplicate item id {i}", lineno)
            if i < prev:
                raise ParseError(f"unsorted item id {i}", lineno)
            prev = i
        max_id = max(max_id, ids[-1])
        transactions.append(tuple(ids))
    if not transactions:
        raise EmptyDatasetError("item-list file contains no transactions")
    return Dataset(transactions, max(max_id + 1, 1))


def _parse_one_hot(text: str) -> Dataset:
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise EmptyDatasetError("one-hot CSV is empty")
    names = [c.strip() for c in rows[0]]
    m = len(names)
    if m == 0:
        raise ParseError("header row has no columns", 1)
    transactions: list[Transaction] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != m:
            raise ParseError(f"expected {m} cells, got {len(row)}", lineno)
        items = []
        for col, cell in enumerate(row):
            v = cell.strip()
            if v == "1":
                items.append(col)
            elif v != "0":
                raise ParseError(f"cell {cell!r} not in {{0,1}}", lineno)
        transactions.append(tuple(items))
    if not transactions:
        raise EmptyDatasetError("one-hot CSV has a header but no rows")
    return Dataset(transactions, m, names)


def save_item_list(dataset: Dataset, path: str | Path) -> None:
    """Write canonical item-list text (sorted ids, source order, one trailing newline per line)."""
    Path(path).write_text(to_item_list(dataset), encoding="utf-8")


def to_item_list(dataset: Dataset) -> str:
    return "".join(" ".join(str(i) for i in t) + "\n" for t in dataset.transactions)


def densify(dataset: Dataset) -> tuple[Dataset, list[int]]:
    """Remap the alphabet to the items that actually occur.

    Returns the remapped dataset plus the mapping ``dense id -> original id``.
    The original ids become the item names of the result so downstream output
    keeps the source labelling.
    """
    used = sorted({i for t in dataset.transactions for i in t})
    if not used:
        used = [0]
    back = {orig: dense for dense, orig in enumerate(used)}
    names = [dataset.item_label(orig) for orig in used]
    remapped = [tuple(back[i] for i in t) for t in dataset.transactions]
    return Dataset(remapped, len(used), names), used
