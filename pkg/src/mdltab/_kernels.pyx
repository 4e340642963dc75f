# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: closed-pattern mining and greedy cover bookkeeping.

Same API as `mdltab._kernels_py`; transactions, tidsets and table rows are
fixed-width uint64 bitset matrices so the inner subset/intersection loops run
a word at a time in C.
"""

import numpy as np

BACKEND_NAME = "native"

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define POPCOUNT64(x) __builtin_popcountll(x)
    #else
    static int POPCOUNT64(unsigned long long x) { int c=0; while (x) { x &= x-1; ++c; } return c; }
    #endif
    """
    int POPCOUNT64(unsigned long long x) nogil

ctypedef unsigned long long u64


def _pack(transactions, Py_ssize_t width_bits):
    """Rows of item ids -> uint64 bitset matrix."""
    cdef Py_ssize_t words = (width_bits + 63) >> 6
    arr = np.zeros((len(transactions), words), dtype=np.uint64)
    cdef u64[:, ::1] mv = arr
    cdef Py_ssize_t j
    cdef long i
    for j, t in enumerate(transactions):
        for i in t:
            mv[j, i >> 6] |= (<u64>1) << (i & 63)
    return arr


cdef inline bint _is_subset(u64[:, ::1] rows, Py_ssize_t r, u64* rem, Py_ssize_t w) nogil:
    cdef Py_ssize_t k
    for k in range(w):
        if rows[r, k] & ~rem[k]:
            return False
    return True


def mine_closed(transactions, Py_ssize_t alphabet_size, long minsup):
    """All closed patterns with support >= minsup; discovery order."""
    cdef Py_ssize_t n = len(transactions)
    cdef Py_ssize_t tw = (n + 63) >> 6
    # vertical tidsets: one bitset over transactions per item
    tids_arr = np.zeros((alphabet_size, tw), dtype=np.uint64)
    cdef u64[:, ::1] tids = tids_arr
    cdef Py_ssize_t j
    cdef long i
    for j, t in enumerate(transactions):
        for i in t:
            tids[i, j >> 6] |= (<u64>1) << (j & 63)

    root_tids = np.zeros(tw, dtype=np.uint64)
    cdef u64[::1] rt = root_tids
    for j in range(n):
        rt[j >> 6] |= (<u64>1) << (j & 63)

    cdef long it
    root_alive = []
    cdef long cnt
    cdef Py_ssize_t k
    for it in range(alphabet_size):
        cnt = 0
        for k in range(tw):
            cnt += POPCOUNT64(tids[it, k])
        if cnt >= minsup:
            root_alive.append(it)

    out = []
    # stack entries: (pattern item tuple, tids array, core index, alive int array)
    stack = [((), root_tids, -1, np.array(root_alive, dtype=np.int64))]

    cdef u64[::1] ptids, newt_mv
    cdef long[::1] _unused
    cdef long long[::1] alive_mv, counts_mv
    cdef long core, sup, ai, item
    cdef Py_ssize_t na, idx, w

    newt_arr = np.zeros(tw, dtype=np.uint64)
    while stack:
        pitems, ptids_arr, core_py, alive_arr = stack.pop()
        ptids = ptids_arr
        core = core_py
        alive_mv = alive_arr
        na = alive_arr.shape[0]
        pset = set(pitems)
        counts_arr = np.empty(na, dtype=np.int64)
        counts_mv = counts_arr
        for idx in range(na):
            item = alive_mv[idx]
            if item <= core or item in pset:
                continue
            # supporters of P + {item}
            newt_arr_local = np.empty(tw, dtype=np.uint64)
            newt_mv = newt_arr_local
            sup = 0
            for w in range(tw):
                newt_mv[w] = ptids[w] & tids[item, w]
                sup += POPCOUNT64(newt_mv[w])
            if sup < minsup:
                continue
            # one pass: local support of every alive item inside the new tids
            for ai in range(na):
                cnt = 0
                for w in range(tw):
                    cnt += POPCOUNT64(tids[alive_mv[ai], w] & newt_mv[w])
                counts_mv[ai] = cnt
            # closure = alive items fully covering the supporters
            closure = [alive_mv[ai] for ai in range(na) if counts_mv[ai] == sup]
            # prefix preservation: nothing new below the extension item
            ok = True
            for q in closure:
                if q >= item:
                    break
                if q not in pset:
                    ok = False
                    break
            if not ok:
                continue
            qitems = tuple(closure)
            out.append((qitems, sup))
            child_alive = np.array(
                [alive_mv[ai] for ai in range(na) if counts_mv[ai] >= minsup],
                dtype=np.int64,
            )
            stack.append((qitems, newt_arr_local, item, child_alive))
    return out


cdef class CoverEngine:
    """Greedy-cover workhorse; see the pure-Python twin for semantics."""

    cdef object trans_arr           # uint64 [n, W]
    cdef object rows_arr            # uint64 [R, W]
    cdef Py_ssize_t n, words
    cdef public long alphabet_size

    def __init__(self, transactions, alphabet_size):
        self.alphabet_size = alphabet_size
        self.words = (alphabet_size + 63) >> 6
        self.trans_arr = _pack(transactions, alphabet_size)
        self.n = self.trans_arr.shape[0]
        self.rows_arr = np.zeros((0, self.words), dtype=np.uint64)

    def set_rows(self, rows):
        self.rows_arr = _pack(rows, self.alphabet_size)

    def insert_row(self, Py_ssize_t pos, items):
        new_row = _pack([items], self.alphabet_size)
        self.rows_arr = np.insert(self.rows_arr, pos, new_row[0], axis=0)

    def remove_row(self, Py_ssize_t pos):
        self.rows_arr = np.delete(self.rows_arr, pos, axis=0)

    def cover_one(self, items):
        cdef u64[:, ::1] rows = self.rows_arr
        cdef Py_ssize_t nrows = rows.shape[0]
        cdef Py_ssize_t w = self.words
        rem_arr = _pack([items], self.alphabet_size)
        cdef u64[:, ::1] rem2 = rem_arr
        cdef u64* rem = &rem2[0, 0]
        cdef Py_ssize_t r, k
        cdef bint empty
        taken = []
        for r in range(nrows):
            empty = True
            for k in range(w):
                if rem[k]:
                    empty = False
                    break
            if empty:
                break
            if _is_subset(rows, r, rem, w):
                taken.append(r)
                for k in range(w):
                    rem[k] &= ~rows[r, k]
        leftover = self._leftover(rem_arr)
        if leftover:
            raise ValueError("uncovered items", leftover)
        return taken

    def _leftover(self, rem_arr):
        cdef u64[:, ::1] rem = rem_arr
        cdef Py_ssize_t k
        out = []
        for k in range(self.words):
            word = int(rem[0, k])
            base = k << 6
            while word:
                low = word & -word
                out.append(base + low.bit_length() - 1)
                word ^= low
        return out

    def usages_full(self):
        cdef u64[:, ::1] rows = self.rows_arr
        cdef u64[:, ::1] trans = self.trans_arr
        cdef Py_ssize_t nrows = rows.shape[0]
        cdef Py_ssize_t w = self.words
        usage_arr = np.zeros(nrows, dtype=np.int64)
        cdef long long[::1] usage = usage_arr
        rem_arr = np.zeros(w, dtype=np.uint64)
        cdef u64[::1] rem_mv = rem_arr
        cdef u64* rem = &rem_mv[0] if w else NULL
        cdef Py_ssize_t t, r, k
        cdef bint empty
        for t in range(self.n):
            for k in range(w):
                rem[k] = trans[t, k]
            for r in range(nrows):
                empty = True
                for k in range(w):
                    if rem[k]:
                        empty = False
                        break
                if empty:
                    break
                if _is_subset(rows, r, rem, w):
                    usage[r] += 1
                    for k in range(w):
                        rem[k] &= ~rows[r, k]
            for k in range(w):
                if rem[k]:
                    raise ValueError("uncovered items", self._leftover(rem_arr.reshape(1, -1)))
        return usage_arr.tolist()

    def members(self, items):
        cand_arr = _pack([items], self.alphabet_size)
        cdef u64[:, ::1] cand = cand_arr
        cdef u64[:, ::1] trans = self.trans_arr
        cdef Py_ssize_t t, k
        cdef bint ok
        out = []
        for t in range(self.n):
            ok = True
            for k in range(self.words):
                if cand[0, k] & ~trans[t, k]:
                    ok = False
                    break
            if ok:
                out.append(t)
        return out

    def delta_for_insert(self, Py_ssize_t pos, items):
        cdef u64[:, ::1] rows = self.rows_arr
        cdef u64[:, ::1] trans = self.trans_arr
        cand_arr = _pack([items], self.alphabet_size)
        cdef u64[:, ::1] cand = cand_arr
        cdef Py_ssize_t nrows = rows.shape[0]
        cdef Py_ssize_t w = self.words
        delta_arr = np.zeros(nrows + 1, dtype=np.int64)
        cdef long long[::1] deltas = delta_arr
        rem_arr = np.zeros(w, dtype=np.uint64)
        cdef u64[::1] rem_mv = rem_arr
        cdef u64* rem = &rem_mv[0] if w else NULL
        cdef Py_ssize_t t, r, k, slot
        cdef bint ok, empty, take
        for t in range(self.n):
            ok = True
            for k in range(w):
                if cand[0, k] & ~trans[t, k]:
                    ok = False
                    break
            if not ok:
                continue
            # cover without the candidate
            for k in range(w):
                rem[k] = trans[t, k]
            for r in range(nrows):
                empty = True
                for k in range(w):
                    if rem[k]:
                        empty = False
                        break
                if empty:
                    break
                if _is_subset(rows, r, rem, w):
                    deltas[r] -= 1
                    for k in range(w):
                        rem[k] &= ~rows[r, k]
            # cover with the candidate at ``pos``
            for k in range(w):
                rem[k] = trans[t, k]
            for r in range(nrows + 1):
                empty = True
                for k in range(w):
                    if rem[k]:
                        empty = False
                        break
                if empty:
                    break
                if r == pos:
                    take = True
                    for k in range(w):
                        if cand[0, k] & ~rem[k]:
                            take = False
                            break
                    if take:
                        deltas[nrows] += 1
                        for k in range(w):
                            rem[k] &= ~cand[0, k]
                    continue
                slot = r if r < pos else r - 1
                if _is_subset(rows, slot, rem, w):
                    deltas[slot] += 1
                    for k in range(w):
                        rem[k] &= ~rows[slot, k]
        return delta_arr.tolist()
