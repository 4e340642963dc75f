"""Covers, code lengths, two-part totals and greedy table construction."""

import math
import random

import pytest

from mdltab.codetable import (
    CodeTable,
    CodeTableRow,
    build_code_table,
    code_table_length,
    cover,
    cover_order_key,
    encoded_length_dataset,
    encoded_length_transaction,
    recompute_usages,
    shannon_code_lengths,
    standard_code_table,
    total_length,
)
from mdltab.data import Dataset, Pattern
from mdltab.errors import UncoverableItemError
from mdltab.mining import MinSup, mine_cfp

from conftest import ids, random_dataset
from oracle import verify_cover


def published_final_table(worked_example) -> CodeTable:
    """The known-good final table for the ten-transaction example."""
    cands = mine_cfp(worked_example, MinSup.absolute(1))
    return build_code_table(worked_example, cands, epsilon=0.1)


def assert_table_invariants(ct: CodeTable, ds: Dataset):
    """Criterion-7 structural checks, reused everywhere tables appear."""
    # every singleton exactly once
    singles = [r.pattern for r in ct.rows if len(r.pattern) == 1]
    assert sorted(singles) == [(i,) for i in range(ct.alphabet_size)]
    # cover order
    keys = [cover_order_key(r.pattern, r.support) for r in ct.rows]
    assert keys == sorted(keys)
    # Kraft
    assert sum(2.0 ** -r.code_length_bits for r in ct.rows) <= 1.0 + 1e-12
    # disjoint exact covers
    for t in ds.transactions:
        cov = cover(ct, t)
        ok, why = verify_cover(cov.parts, t)
        assert ok, why
    # objective never worse than the all-singletons baseline
    std = standard_code_table(ds, ct.epsilon)
    assert total_length(ct, ds) <= total_length(std, ds) + 1e-9
    # usage conservation
    usage_sum = sum(r.usage for r in ct.rows)
    cover_sum = sum(len(cover(ct, t).parts) for t in ds.transactions)
    assert usage_sum == cover_sum


class TestStandardTable:
    def test_worked_example_usages(self, worked_example):
        std = standard_code_table(worked_example, 0.1)
        by_item = {r.pattern[0]: r.usage for r in std.rows}
        assert by_item == {
            ids(1)[0]: 3,
            ids(2)[0]: 5,
            ids(3)[0]: 5,
            ids(4)[0]: 7,
            ids(5)[0]: 4,
        }
        assert_table_invariants(std, worked_example)

    def test_single_transaction_zero_bits(self):
        ds = Dataset([(0,)], 1)
        std = standard_code_table(ds)
        assert len(std.rows) == 1
        assert std.rows[0].usage == 1
        assert std.rows[0].code_length_bits == 0

    def test_uniform_two_item_code(self):
        ds = Dataset([(0, 1)] * 6, 2)
        std = standard_code_table(ds)
        assert [r.usage for r in std.rows] == [6, 6]
        assert [r.code_length_bits for r in std.rows] == [1, 1]


class TestCover:
    def test_published_cover_uses_long_row(self, worked_example):
        ct = published_final_table(worked_example)
        cov = cover(ct, ids(1, 2, 3, 4))
        assert cov.parts == [ids(1, 2, 4), ids(3)]

    def test_singleton(self, worked_example):
        ct = published_final_table(worked_example)
        assert cover(ct, ids(5)).parts == [ids(5)]

    def test_falls_back_to_singletons(self, worked_example):
        ct = published_final_table(worked_example)
        cov = cover(ct, ids(2, 3, 4, 5))
        assert cov.parts == [ids(4), ids(3), ids(2), ids(5)]

    def test_out_of_alphabet(self, worked_example):
        ct = published_final_table(worked_example)
        with pytest.raises(UncoverableItemError) as err:
            cover(ct, (97,))
        assert 97 in err.value.items

    def test_empty_transaction(self, worked_example):
        ct = published_final_table(worked_example)
        assert cover(ct, ()).parts == []


class TestRecomputeUsages:
    def test_worked_example_final_usages_and_bits(self, worked_example):
        ct = published_final_table(worked_example)
        recompute_usages(ct, worked_example)
        rows = {r.pattern: r for r in ct.rows}
        assert rows[ids(1, 2, 4)].usage == 3
        assert rows[ids(4)].usage == 4
        assert rows[ids(3)].usage == 5
        assert rows[ids(2)].usage == 2
        assert rows[ids(5)].usage == 4
        assert rows[ids(1)].usage == 0
        assert [r.code_length_bits for r in ct.rows] == [3, 3, 2, 4, 3, 8]

    def test_flags_dead_nonsingleton(self, worked_example, caplog):
        rows = [
            CodeTableRow(ids(1, 5), 0, 0, 1),  # never a subset of any transaction
        ] + [CodeTableRow((i,), 0, 0, 1) for i in range(5)]
        rows.sort(key=lambda r: cover_order_key(r.pattern, r.support))
        ct = CodeTable(rows, 5, 0.1)
        with caplog.at_level("WARNING"):
            recompute_usages(ct, worked_example)
        assert ct.row_for(ids(1, 5)).usage == 0
        assert any("covers nothing" in m for m in caplog.messages)


class TestEncodedLengths:
    def test_published_transaction_lengths(self, worked_example):
        ct = published_final_table(worked_example)
        assert encoded_length_transaction(ct, ids(1, 2, 3, 4)) == 5  # 3 + 2
        assert encoded_length_transaction(ct, ()) == 0
        assert encoded_length_transaction(ct, ids(2, 3, 4, 5)) == 12  # 3+2+4+3

    def test_dataset_length_matches_usage_weighted_sum(self, worked_example):
        ct = published_final_table(worked_example)
        want = sum(r.usage * r.code_length_bits for r in ct.rows)
        assert encoded_length_dataset(ct, worked_example) == want

    def test_single_transaction_dataset(self):
        ds = Dataset([(0, 1)], 2)
        ct = standard_code_table(ds)
        assert encoded_length_dataset(ct, ds) == encoded_length_transaction(ct, (0, 1))


class TestTableLength:
    def test_all_singletons_formula(self):
        ds = Dataset([(0, 1, 2), (0, 1), (2,)], 3)
        std = standard_code_table(ds)
        slot = math.log2(4)
        want = 3 * slot + 3 * slot + sum(r.code_length_bits for r in std.rows)
        assert code_table_length(std) == pytest.approx(want)

    def test_zero_usage_rows_cost_nothing(self, worked_example):
        ct = published_final_table(worked_example)
        slot = math.log2(6)
        # in-use rows: {1,2,4} and four singletons -> 7 item slots + 5 separators
        want = slot * (7 + 5) + (3 + 3 + 2 + 4 + 3)
        assert code_table_length(ct) == pytest.approx(want)


class TestBuild:
    def test_worked_example_published_table(self, worked_example):
        ct = published_final_table(worked_example)
        assert [r.pattern for r in ct.rows] == [
            ids(1, 2, 4),
            ids(4),
            ids(3),
            ids(2),
            ids(5),
            ids(1),
        ]
        assert [r.code_length_bits for r in ct.rows] == [3, 3, 2, 4, 3, 8]
        assert_table_invariants(ct, worked_example)

    def test_empty_candidates_gives_standard(self, worked_example):
        ct = build_code_table(worked_example, [])
        std = standard_code_table(worked_example)
        assert [(r.pattern, r.usage, r.code_length_bits) for r in ct.rows] == [
            (r.pattern, r.usage, r.code_length_bits) for r in std.rows
        ]

    def test_deterministic(self, worked_example):
        cands = mine_cfp(worked_example, MinSup.absolute(1))
        a = build_code_table(worked_example, cands)
        b = build_code_table(worked_example, cands)
        assert [(r.pattern, r.usage, r.support, r.code_length_bits) for r in a.rows] == [
            (r.pattern, r.usage, r.support, r.code_length_bits) for r in b.rows
        ]

    def test_objective_monotone_and_invariants_random(self):
        rng = random.Random(51)
        for _ in range(20):
            ds = random_dataset(rng, max_m=8, max_n=20)
            cands = mine_cfp(ds, MinSup.absolute(1))
            ct = build_code_table(ds, cands)
            assert_table_invariants(ct, ds)
            for r in ct.rows:
                if not r.is_singleton():
                    assert r.usage >= 1

    def test_incremental_matches_naive_rebuild(self):
        """The restricted re-cover during trials must equal covering everything."""
        rng = random.Random(52)
        for _ in range(10):
            ds = random_dataset(rng, max_m=8, max_n=15)
            cands = mine_cfp(ds, MinSup.absolute(1))
            ct = build_code_table(ds, cands)
            # recompute usages from scratch and compare
            fresh = [0] * len(ct.rows)
            for t in ds.transactions:
                for ridx in cover(ct, t).row_indices:
                    fresh[ridx] += 1
            assert fresh == [r.usage for r in ct.rows]


class TestShannonLengths:
    def test_exact_powers_of_two_do_not_round_up(self):
        bits = shannon_code_lengths([3, 5, 5, 7, 4], epsilon=0.1)
        # 24/3 = 8 exactly -> 3 bits, never 4
        assert list(bits) == [3, 3, 3, 2, 3]

    def test_epsilon_row_value(self):
        bits = shannon_code_lengths([3, 4, 5, 2, 4, 0], epsilon=0.1)
        assert list(bits) == [3, 3, 2, 4, 3, 8]


def test_json_round_trip(tmp_path, worked_example):
    ct = published_final_table(worked_example)
    path = tmp_path / "ct.json"
    ct.save_json(path)
    back = CodeTable.load_json(path)
    assert back.alphabet_size == ct.alphabet_size
    assert back.epsilon == ct.epsilon
    assert [(r.pattern, r.usage, r.support, r.code_length_bits) for r in back.rows] == [
        (r.pattern, r.usage, r.support, r.code_length_bits) for r in ct.rows
    ]
    path2 = tmp_path / "ct2.json"
    back.save_json(path2)
    assert path.read_text() == path2.read_text()
