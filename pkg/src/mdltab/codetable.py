"""Code tables: covers, usages, two-part description length and greedy selection.

A code table is an ordered list of patterns, each with a prefix-code length
derived from how often the pattern appears in the greedy covers of the
training transactions.  Rows are kept in cover order (longer first, then
higher support, then descending lexicographic) and always include every
singleton so any transaction over the alphabet can be covered.

The selection objective is the two-part total ``L(D|CT) + L(CT)``:

* ``L(D|CT)``  - each transaction costs the sum of the code lengths of the
  rows in its cover.
* ``L(CT)``    - each in-use row costs ``log2(m+1)`` bits per item plus one
  separator slot, plus its own code length.

Rows whose usage is zero stay in the table (priced with the pseudo-usage
``epsilon`` so unseen data can still be encoded) but contribute nothing to
the objective; counting their epsilon codes into ``L(CT)`` would make the
objective reject every pattern that merely idles a singleton.
"""

from __future__ import annotations

import bisect
import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import backend
from .data import Dataset, Pattern, Transaction
from .errors import DomainError, UncoverableItemError
from .mining import CfpSet

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.1


def cover_order_key(items: Sequence[int], support: int):
    """Sort key: length desc, support desc, lexicographic desc."""
    return (-len(items), -support, tuple(-i for i in items))


@dataclass
class CodeTableRow:
    """One table row: a pattern with its usage, support and code length."""

    pattern: Transaction
    usage: int
    support: int
    code_length_bits: int

    def effective_usage(self, epsilon: float) -> float:
        return self.usage if self.usage > 0 else epsilon

    def is_singleton(self) -> bool:
        return len(self.pattern) == 1


class CodeTable:
    """Ordered code-table rows over a fixed alphabet."""

    def __init__(self, rows: list[CodeTableRow], alphabet_size: int, epsilon: float):
        self.rows = rows
        self.alphabet_size = alphabet_size
        self.epsilon = epsilon
        self._index = {r.pattern: r for r in rows}

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def training_total_usage(self) -> float:
        return float(sum(r.effective_usage(self.epsilon) for r in self.rows))

    def row_for(self, items: Transaction) -> CodeTableRow | None:
        return self._index.get(tuple(items))

    def has_pattern(self, items: Transaction) -> bool:
        return tuple(items) in self._index

    def nonsingleton_count(self) -> int:
        return sum(1 for r in self.rows if not r.is_singleton())

    def save_json(self, path: str | Path) -> None:
        payload = {
            "alphabet_size": self.alphabet_size,
            "epsilon": self.epsilon,
            "rows": [
                {
                    "items": list(r.pattern),
                    "usage": r.usage,
                    "support": r.support,
                    "code_length_bits": r.code_length_bits,
                }
                for r in self.rows
            ],
        }
        Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load_json(cls, path: str | Path) -> "CodeTable":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        rows = [
            CodeTableRow(
                tuple(r["items"]), r["usage"], r["support"], r["code_length_bits"]
            )
            for r in payload["rows"]
        ]
        return cls(rows, payload["alphabet_size"], payload["epsilon"])


@dataclass
class Cover:
    """Greedy decomposition of a transaction into disjoint table rows."""

    parts: list[Transaction]
    row_indices: list[int]


def _ceil_log2_exact(total: float, eff: float) -> int:
    """ceil(log2(total/eff)) evaluated exactly on the given float values."""
    q = Fraction(total) / Fraction(eff)
    num, den = q.numerator, q.denominator
    level = (num // den).bit_length()
    while level > 0 and (den << (level - 1)) >= num:
        level -= 1
    while (den << level) < num:
        level += 1
    return level


def shannon_code_lengths(usages: Sequence[float], epsilon: float) -> np.ndarray:
    """Per-row code lengths ``ceil(-log2(eff/total))``.

    Zero usages are substituted with ``epsilon``; the total runs over the
    substituted values.  Near-integer logs are re-evaluated exactly so a
    probability that is a true power of two never rounds up by float noise.
    """
    u = np.asarray(usages, dtype=float)
    eff = np.where(u > 0, u, epsilon)
    total = float(eff.sum())
    x = np.log2(total / eff)
    bits = np.ceil(x)
    near = np.abs(x - np.rint(x)) < 1e-9
    for idx in np.nonzero(near)[0]:
        bits[idx] = _ceil_log2_exact(total, float(eff[idx]))
    return bits.astype(np.int64)


def _objective(
    usages: np.ndarray, n_items: np.ndarray, alphabet_size: int, epsilon: float
) -> float:
    """Two-part total length for a row configuration (in-use rows only)."""
    bits = shannon_code_lengths(usages, epsilon)
    used = usages > 0
    l_data = float((usages[used] * bits[used]).sum())
    slot = math.log2(alphabet_size + 1)
    l_table = slot * float((n_items[used] + 1).sum()) + float(bits[used].sum())
    return l_data + l_table


def standard_code_table(dataset: Dataset, epsilon: float = DEFAULT_EPSILON) -> CodeTable:
    """The all-singletons table; singleton usage equals item support."""
    supports = dataset.item_supports()
    order = sorted(range(dataset.alphabet_size), key=lambda i: cover_order_key((i,), supports[i]))
    usages = [supports[i] for i in order]
    bits = shannon_code_lengths(usages, epsilon)
    rows = [
        CodeTableRow((i,), supports[i], supports[i], int(b))
        for i, b in zip(order, bits)
    ]
    return CodeTable(rows, dataset.alphabet_size, epsilon)


def cover(code_table: CodeTable, t: Iterable[int]) -> Cover:
    """Greedy cover: scan rows in table order, take a row when its pattern
    fits inside the uncovered remainder; singletons guarantee completion."""
    remainder = set(t)
    for i in remainder:
        if not 0 <= i < code_table.alphabet_size:
            raise UncoverableItemError([i])
    parts: list[Transaction] = []
    taken: list[int] = []
    for ridx, row in enumerate(code_table.rows):
        if not remainder:
            break
        p = row.pattern
        if remainder.issuperset(p):
            parts.append(p)
            taken.append(ridx)
            remainder.difference_update(p)
    if remainder:
        raise UncoverableItemError(remainder)
    return Cover(parts, taken)


def encoded_length_transaction(code_table: CodeTable, t: Iterable[int]) -> float:
    """Bits to encode one transaction: sum of its cover's code lengths."""
    cov = cover(code_table, t)
    return float(sum(code_table.rows[r].code_length_bits for r in cov.row_indices))


def encoded_length_dataset(code_table: CodeTable, dataset: Dataset) -> float:
    return float(sum(encoded_length_transaction(code_table, t) for t in dataset.transactions))


def code_table_length(code_table: CodeTable) -> float:
    """Model cost: item and separator slots plus code lengths of in-use rows."""
    slot = math.log2(code_table.alphabet_size + 1)
    total = 0.0
    for r in code_table.rows:
        if r.usage > 0:
            total += slot * (len(r.pattern) + 1) + r.code_length_bits
    return total


def total_length(code_table: CodeTable, dataset: Dataset) -> float:
    return encoded_length_dataset(code_table, dataset) + code_table_length(code_table)


def recompute_usages(code_table: CodeTable, dataset: Dataset) -> CodeTable:
    """Re-cover the dataset, refresh usages and all code lengths in place."""
    if dataset.alphabet_size != code_table.alphabet_size:
        raise DomainError(
            f"dataset alphabet {dataset.alphabet_size} does not match "
            f"table alphabet {code_table.alphabet_size}"
        )
    engine = backend.CoverEngine(dataset.transactions, dataset.alphabet_size)
    engine.set_rows([r.pattern for r in code_table.rows])
    try:
        usages = engine.usages_full()
    except ValueError as exc:
        leftover = exc.args[1] if len(exc.args) > 1 else []
        raise UncoverableItemError(leftover) from exc
    bits = shannon_code_lengths(usages, code_table.epsilon)
    for row, u, b in zip(code_table.rows, usages, bits):
        row.usage = int(u)
        row.code_length_bits = int(b)
        if u == 0 and not row.is_singleton():
            logger.warning("non-singleton row %s covers nothing in this dataset", row.pattern)
    return code_table


def build_code_table(
    dataset: Dataset,
    candidates: CfpSet | Sequence[Pattern],
    epsilon: float = DEFAULT_EPSILON,
) -> CodeTable:
    """Greedy MDL selection over an ordered candidate list.

    Starting from the all-singletons table, each non-singleton candidate is
    tentatively inserted at its cover-order position; it stays only when the
    two-part total strictly shrinks.  Usage changes are evaluated exactly by
    re-covering just the transactions that contain the candidate (covers of
    all other transactions cannot change).
    """
    pats = list(candidates.patterns if isinstance(candidates, CfpSet) else candidates)
    m = dataset.alphabet_size
    supports = dataset.item_supports()

    order = sorted(range(m), key=lambda i: cover_order_key((i,), supports[i]))
    row_items: list[Transaction] = [(i,) for i in order]
    row_support: list[int] = [supports[i] for i in order]
    row_keys = [cover_order_key((i,), supports[i]) for i in order]
    usages: list[int] = [supports[i] for i in order]

    engine = backend.CoverEngine(dataset.transactions, m)
    engine.set_rows(row_items)

    current = _objective(
        np.array(usages, dtype=np.int64),
        np.array([1] * m, dtype=np.int64),
        m,
        epsilon,
    )
    present = set(row_items)

    for pat in pats:
        items = tuple(pat.items)
        if len(items) < 2 or items in present:
            continue
        for i in items:
            if not 0 <= i < m:
                raise DomainError(f"candidate item {i} outside alphabet 0..{m - 1}")
        support = pat.support if pat.support is not None else dataset.support(items)
        key = cover_order_key(items, support)
        pos = bisect.bisect_left(row_keys, key)

        deltas = engine.delta_for_insert(pos, items)
        cand_usage = int(deltas[-1])
        if cand_usage == 0:
            continue  # covers unchanged; the new row can only add model cost
        trial_usages = [u + d for u, d in zip(usages, deltas[:-1])]
        trial_usages.insert(pos, cand_usage)
        trial_n_items = [len(it) for it in row_items]
        trial_n_items.insert(pos, len(items))
        trial = _objective(
            np.array(trial_usages, dtype=np.int64),
            np.array(trial_n_items, dtype=np.int64),
            m,
            epsilon,
        )
        if trial < current:
            engine.insert_row(pos, items)
            row_items.insert(pos, items)
            row_support.insert(pos, support)
            row_keys.insert(pos, key)
            usages = trial_usages
            present.add(items)
            current = trial

    final_usages = engine.usages_full()
    if list(final_usages) != usages:
        raise AssertionError("incremental usage bookkeeping diverged from full recompute")
    bits = shannon_code_lengths(usages, epsilon)
    rows = [
        CodeTableRow(it, int(u), int(s), int(b))
        for it, u, s, b in zip(row_items, usages, row_support, bits)
    ]
    table = CodeTable(rows, m, epsilon)
    for row in rows:
        if row.usage == 0 and not row.is_singleton():
            logger.warning("accepted pattern %s ended construction unused", row.pattern)
    return table
