"""Pure-Python kernels: closed-pattern mining and greedy cover bookkeeping.

Same API as the compiled extension (`mdltab._kernels`).  Transactions and
table rows are held as Python-int bitmasks, so subset tests and intersections
run word-parallel through CPython's bignum ops; adequate for small and medium
inputs and always available as a fallback.
"""

from __future__ import annotations

from typing import Iterable, Sequence

BACKEND_NAME = "python"


def _mask(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


def _unmask(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mine_closed(
    transactions: Sequence[Sequence[int]], alphabet_size: int, minsup: int
) -> list[tuple[tuple[int, ...], int]]:
    """All closed patterns with support >= minsup, via prefix-preserving
    closure extension over vertical tid bitsets.

    Returns (items, support) pairs in discovery order; callers canonicalise.
    """
    n = len(transactions)
    tids = [0] * alphabet_size
    for j, t in enumerate(transactions):
        bit = 1 << j
        for i in t:
            tids[i] |= bit
    all_tids = (1 << n) - 1

    # (pattern mask, supporter tids, core item, candidate items alive at the parent)
    root_alive = [i for i in range(alphabet_size) if tids[i].bit_count() >= minsup]
    stack: list[tuple[int, int, int, list[int]]] = [(0, all_tids, -1, root_alive)]
    out: list[tuple[tuple[int, ...], int]] = []

    while stack:
        pmask, ptids, core, alive = stack.pop()
        for i in alive:
            if i <= core or (pmask >> i) & 1:
                continue
            newt = ptids & tids[i]
            sup = newt.bit_count()
            if sup < minsup:
                continue
            # closure: every alive item whose tidset covers all supporters
            qmask = 0
            for j in alive:
                if tids[j] & newt == newt:
                    qmask |= 1 << j
            # prefix preservation: no new items below the extension item
            below = (1 << i) - 1
            if qmask & below != pmask & below:
                continue
            out.append((_unmask(qmask), sup))
            child_alive = [j for j in alive if (tids[j] & newt).bit_count() >= minsup]
            stack.append((qmask, newt, i, child_alive))
    return out


class CoverEngine:
    """Greedy-cover workhorse for code-table construction.

    Holds the dataset's transaction masks and an ordered list of row masks.
    ``delta_for_insert`` evaluates the exact usage change a trial insertion
    would cause: only transactions containing the candidate can change cover,
    so those are re-covered with and without the candidate row.
    """

    def __init__(self, transactions: Sequence[Sequence[int]], alphabet_size: int):
        self.alphabet_size = alphabet_size
        self.trans = [_mask(t) for t in transactions]
        self.rows: list[int] = []

    def set_rows(self, rows: Sequence[Sequence[int]]) -> None:
        self.rows = [_mask(r) for r in rows]

    def insert_row(self, pos: int, items: Sequence[int]) -> None:
        self.rows.insert(pos, _mask(items))

    def remove_row(self, pos: int) -> None:
        del self.rows[pos]

    def cover_one(self, items: Sequence[int]) -> list[int]:
        """Row indices greedily covering ``items``; leftover bits -> ValueError."""
        remainder = _mask(items)
        taken = []
        for r, rm in enumerate(self.rows):
            if remainder == 0:
                break
            if rm & remainder == rm:
                taken.append(r)
                remainder &= ~rm
        if remainder:
            raise ValueError("uncovered items", list(_unmask(remainder)))
        return taken

    def usages_full(self) -> list[int]:
        """Usage of every row over the whole dataset."""
        usages = [0] * len(self.rows)
        rows = self.rows
        for tm in self.trans:
            remainder = tm
            for r, rm in enumerate(rows):
                if remainder == 0:
                    break
                if rm & remainder == rm:
                    usages[r] += 1
                    remainder &= ~rm
            if remainder:
                raise ValueError("uncovered items", list(_unmask(remainder)))
        return usages

    def members(self, items: Sequence[int]) -> list[int]:
        pm = _mask(items)
        return [j for j, tm in enumerate(self.trans) if tm & pm == pm]

    def delta_for_insert(self, pos: int, items: Sequence[int]) -> list[int]:
        """Usage deltas from inserting ``items`` at row position ``pos``.

        Entry r < len(rows) is the change for existing row r; the last entry
        is the candidate's own usage.  Exactly equal to a full recompute.
        """
        cand = _mask(items)
        rows = self.rows
        nrows = len(rows)
        deltas = [0] * (nrows + 1)
        for tm in self.trans:
            if tm & cand != cand:
                continue
            # current cover
            remainder = tm
            for r, rm in enumerate(rows):
                if remainder == 0:
                    break
                if rm & remainder == rm:
                    deltas[r] -= 1
                    remainder &= ~rm
            # cover with the candidate in place
            remainder = tm
            for r in range(nrows + 1):
                if remainder == 0:
                    break
                if r == pos:
                    rm, slot = cand, nrows
                elif r < pos:
                    rm, slot = rows[r], r
                else:
                    rm, slot = rows[r - 1], r - 1
                if rm & remainder == rm:
                    deltas[slot] += 1
                    remainder &= ~rm
        return deltas
