"""Selection pipelines: two-step, HQ-cluster filtering and CFP merging."""

import random

import pytest

from mdltab.mining import MinSup, mine_cfp
from mdltab.pipeline import (
    CLUSTERED,
    KRIMP,
    PipelineConfig,
    clustered_select,
    hq_select,
    krimp_select,
    merge_cfps,
)

from conftest import ids, random_dataset


class _QualityStub:
    """Stands in for a Clustering; hq_select only reads qualities()."""

    def __init__(self, qualities):
        self._qualities = qualities

    def qualities(self):
        return list(self._qualities)


class TestHqSelect:
    def test_published_quality_split(self):
        # eight clusters; only the 0.03 one falls below the 0.05 threshold
        qualities = [0.85, 0.67, 0.25, 0.69, 0.58, 0.84, 0.03, 0.29]
        got = hq_select(_QualityStub(qualities), 0.05)
        assert got == [0, 1, 2, 3, 4, 5, 7]

    def test_threshold_zero_keeps_all(self, cluster_example_1):
        from mdltab.clustering import cluster

        cl = cluster(cluster_example_1, 4.0, 2)
        assert hq_select(cl, 0.0) == [0, 1]

    def test_fallback_when_none_qualify(self, caplog):
        with caplog.at_level("WARNING"):
            got = hq_select(_QualityStub([0.5, 0.25]), 1.0)
        assert got == [0, 1]
        assert any("keeping all clusters" in m for m in caplog.messages)


class TestMergeCfps:
    def test_example_1_union(self, cluster_example_1):
        from mdltab.clustering import cluster

        cl = cluster(cluster_example_1, 4.0, 2)
        per = [
            mine_cfp(cluster_example_1.subset(sorted(c.member_indices)), MinSup.absolute(2))
            for c in cl.clusters
        ]
        merged = merge_cfps(per, cluster_example_1)
        assert {p.items for p in merged} == {
            ids(1, 2, 3, 4),
            ids(2, 3, 4, 5),
            ids(3, 4, 5),
            ids(4, 5),
        }
        # supports recomputed over the whole dataset
        by_items = {p.items: p.support for p in merged}
        assert by_items[ids(4, 5)] == 5
        assert by_items[ids(3, 4, 5)] == 4

    def test_example_2_drops_pattern(self, cluster_example_2):
        from mdltab.clustering import cluster

        cl = cluster(cluster_example_2, 4.0, 2)
        per = [
            mine_cfp(cluster_example_2.subset(sorted(c.member_indices)), MinSup.absolute(2))
            for c in cl.clusters
        ]
        merged = merge_cfps(per, cluster_example_2)
        assert {p.items for p in merged} == {ids(4, 5, 6), ids(1, 2, 3)}
        assert ids(7, 8, 9) not in {p.items for p in merged}

    def test_single_set_identity(self, worked_example):
        cfps = mine_cfp(worked_example, MinSup.absolute(2))
        merged = merge_cfps([cfps], worked_example)
        assert [(p.items, p.support) for p in merged] == [
            (p.items, p.support) for p in cfps
        ]

    def test_merged_support_at_least_cluster_support(self):
        rng = random.Random(61)
        for _ in range(30):
            ds = random_dataset(rng, max_m=8, max_n=20)
            t = rng.randint(1, max(1, len(ds) // 3))
            flags = [rng.randrange(3) for _ in range(len(ds))]
            per = []
            for g in range(3):
                part = [j for j, f in enumerate(flags) if f == g]
                if part:
                    per.append(mine_cfp(ds.subset(part), MinSup.absolute(t)))
            if not per:
                continue
            merged = merge_cfps(per, ds)
            cluster_sup = {}
            for cfps in per:
                for p in cfps:
                    cluster_sup[p.items] = max(cluster_sup.get(p.items, 0), p.support)
            for p in merged:
                assert p.support >= cluster_sup[p.items]


class TestSelect:
    def test_krimp_worked_example(self, worked_example):
        cfg = PipelineConfig(minsup=MinSup.absolute(1), method=KRIMP)
        res = krimp_select(worked_example, cfg)
        assert res.report.candidate_count == 12
        assert [r.pattern for r in res.table.rows][0] == ids(1, 2, 4)
        assert res.report.final_row_count == 6
        assert res.report.nonsingleton_count == 1
        table, report = res  # tuple-style unpacking stays available
        assert table is res.table and report is res.report

    def test_subset_soundness_random(self):
        rng = random.Random(62)
        for _ in range(40):
            ds = random_dataset(rng, max_m=9, max_n=20)
            t = rng.randint(1, max(1, len(ds) // 2))
            whole = {p.items for p in mine_cfp(ds, MinSup.absolute(t))}
            parts = [[] for _ in range(rng.randint(1, 4))]
            for j in range(len(ds)):
                parts[rng.randrange(len(parts))].append(j)
            per = [
                mine_cfp(ds.subset(part), MinSup.absolute(t))
                for part in parts
                if part
            ]
            merged = merge_cfps(per, ds)
            assert {p.items for p in merged} <= whole

    def test_degenerate_clustered_equals_krimp(self, worked_example):
        cfg_k = PipelineConfig(minsup=MinSup.absolute(1), method=KRIMP)
        cfg_c = PipelineConfig(
            minsup=MinSup.absolute(1),
            method=CLUSTERED,
            max_clusters=1,
            quality_threshold=0.0,
        )
        rk = krimp_select(worked_example, cfg_k)
        rc = clustered_select(worked_example, cfg_c)
        assert [(p.items, p.support) for p in rc.candidates] == [
            (p.items, p.support) for p in rk.candidates
        ]
        assert [(r.pattern, r.usage, r.code_length_bits) for r in rc.table.rows] == [
            (r.pattern, r.usage, r.code_length_bits) for r in rk.table.rows
        ]
        assert rc.report.total_length_bits == rk.report.total_length_bits

    def test_clustered_example_2(self, cluster_example_2):
        cfg = PipelineConfig(
            minsup=MinSup.absolute(2), method=CLUSTERED, repulsion=4.0, max_clusters=2,
            quality_threshold=0.0,
        )
        res = clustered_select(cluster_example_2, cfg)
        assert {p.items for p in res.candidates} == {ids(4, 5, 6), ids(1, 2, 3)}
        assert res.report.cluster_qualities
        assert res.clustering is not None

    def test_quality_threshold_validated(self):
        with pytest.raises(Exception):
            PipelineConfig(minsup=MinSup.absolute(1), quality_threshold=1.5)


def test_report_json_round_trip(tmp_path, worked_example):
    cfg = PipelineConfig(minsup=MinSup.absolute(1), method=KRIMP)
    res = krimp_select(worked_example, cfg)
    path = tmp_path / "report.json"
    res.report.to_json(path)
    from mdltab.pipeline import SelectionReport

    back = SelectionReport.from_json(path)
    assert back.candidate_count == res.report.candidate_count
    assert back.total_length_bits == res.report.total_length_bits
    assert "method" in back.summary()
