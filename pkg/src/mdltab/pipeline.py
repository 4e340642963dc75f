"""Model-selection pipelines: whole-dataset two-step and cluster-then-mine.

Two routes produce a code table from a dataset:

* ``krimp_select``     - mine all CFPs of the whole dataset, then run greedy
  code-table construction over them (the classic two-step approach).
* ``clustered_select`` - partition the dataset, keep the high-quality
  clusters, mine each one separately at the threshold resolved against the
  full dataset size, merge the per-cluster patterns, then build the table.

The clustered route extracts a subset of the whole-dataset CFPs (any pattern
closed-frequent inside a cluster is closed-frequent in the full dataset) and
drops mainly short patterns, taming pattern explosion at small thresholds.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .clustering import Clustering, cluster, cluster_quality, write_clustering_file
from .codetable import CodeTable, DEFAULT_EPSILON, build_code_table, code_table_length, encoded_length_dataset
from .data import Dataset, Pattern
from .errors import ParameterError
from .mining import CfpSet, MinSup, candidate_order_key, mine_cfp, write_cfp_file

logger = logging.getLogger(__name__)

KRIMP = "krimp"
CLUSTERED = "clustered"


@dataclass
class PipelineConfig:
    """Knobs shared by both selection routes."""

    minsup: MinSup
    repulsion: float = 4.0
    max_clusters: int = 8
    quality_threshold: float = 0.05
    method: str = CLUSTERED
    epsilon: float = DEFAULT_EPSILON
    threads: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.quality_threshold <= 1.0:
            raise ParameterError("quality_threshold must lie in [0, 1]")
        if self.method not in (KRIMP, CLUSTERED):
            raise ParameterError(f"unknown method {self.method!r}")


@dataclass
class SelectionReport:
    """What one selection run did, for humans and regression checks."""

    method: str
    dataset_size: int
    alphabet_size: int
    minsup_effective: int
    minsup_convention: str
    candidate_count: int
    final_row_count: int
    nonsingleton_count: int
    encoded_dataset_bits: float
    code_table_bits: float
    total_length_bits: float
    cluster_qualities: list[float] = field(default_factory=list)
    hq_clusters: list[int] = field(default_factory=list)
    lq_clusters: list[int] = field(default_factory=list)
    hq_fallback: bool = False
    timings: dict[str, float] = field(default_factory=dict)

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.__dict__, indent=1) + "\n", encoding="utf-8")

    @classmethod
    def from_json(cls, path: str | Path) -> "SelectionReport":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))

    def summary(self) -> str:
        lines = [
            f"method            : {self.method}",
            f"transactions      : {self.dataset_size}",
            f"alphabet          : {self.alphabet_size}",
            f"minsup (effective): {self.minsup_effective} ({self.minsup_convention})",
            f"candidates        : {self.candidate_count}",
            f"final rows        : {self.final_row_count} "
            f"({self.nonsingleton_count} non-singleton)",
            f"L(D|CT)           : {self.encoded_dataset_bits:.1f} bits",
            f"L(CT)             : {self.code_table_bits:.1f} bits",
            f"total             : {self.total_length_bits:.1f} bits",
        ]
        if self.cluster_qualities:
            q = ", ".join(f"{x:.2f}" for x in self.cluster_qualities)
            lines.append(f"cluster qualities : {q}")
            lines.append(f"HQ clusters       : {self.hq_clusters}")
            if self.lq_clusters:
                lines.append(f"LQ clusters       : {self.lq_clusters}")
            if self.hq_fallback:
                lines.append("note              : no cluster met the threshold; all were kept")
        for stage, secs in self.timings.items():
            lines.append(f"time {stage:<13}: {secs:.3f} s")
        return "\n".join(lines)


@dataclass
class SelectionResult:
    """Everything a selection run produced."""

    table: CodeTable
    report: SelectionReport
    candidates: CfpSet
    clustering: Clustering | None = None

    def __iter__(self):
        # allow ``table, report = krimp_select(...)`` style unpacking
        return iter((self.table, self.report))


def hq_select(clustering: Clustering, threshold: float) -> list[int]:
    """Indices of clusters at or above the quality threshold.

    Falls back to all clusters (with a warning) when none qualifies, so the
    pipeline always has something to mine.
    """
    qualities = clustering.qualities()
    chosen = [k for k, q in enumerate(qualities) if q >= threshold]
    if not chosen:
        logger.warning(
            "no cluster reaches quality %.3f (max %.3f); keeping all clusters",
            threshold,
            max(qualities),
        )
        return list(range(len(qualities)))
    return chosen


def merge_cfps(per_cluster: Sequence[CfpSet], dataset: Dataset) -> CfpSet:
    """Union of per-cluster patterns with supports recomputed on the full dataset."""
    seen: dict[tuple[int, ...], int] = {}
    for cfps in per_cluster:
        for p in cfps.patterns:
            if p.items not in seen:
                seen[p.items] = dataset.support(p.items)
    patterns = [Pattern(items, sup) for items, sup in seen.items()]
    patterns.sort(key=lambda p: candidate_order_key(p.items, p.support))
    minsup = per_cluster[0].minsup_used if per_cluster else MinSup.absolute(1)
    return CfpSet(patterns, minsup, source="merged")


def krimp_select(dataset: Dataset, cfg: PipelineConfig) -> SelectionResult:
    """Two-step selection: mine the whole dataset, then build the table."""
    t0 = time.perf_counter()
    cfps = mine_cfp(dataset, cfg.minsup)
    t1 = time.perf_counter()
    table = build_code_table(dataset, cfps, cfg.epsilon)
    t2 = time.perf_counter()
    report = _report(
        KRIMP, dataset, cfg, cfps, table,
        timings={"mining": t1 - t0, "table": t2 - t1},
    )
    return SelectionResult(table, report, cfps)


def clustered_select(dataset: Dataset, cfg: PipelineConfig) -> SelectionResult:
    """Cluster, mine the high-quality clusters, merge, then build the table."""
    t0 = time.perf_counter()
    clustering = cluster(dataset, cfg.repulsion, cfg.max_clusters)
    qualities = clustering.qualities()
    hq = hq_select(clustering, cfg.quality_threshold)
    t1 = time.perf_counter()

    # the threshold is resolved against the full dataset, not cluster sizes
    absolute = MinSup.absolute(cfg.minsup.resolve(len(dataset)))
    subsets = [dataset.subset(sorted(clustering.clusters[k].member_indices)) for k in hq]
    with ThreadPoolExecutor(max_workers=cfg.threads or 1) as pool:
        per_cluster = list(
            pool.map(
                lambda pair: mine_cfp(pair[1], absolute, source=f"cluster({pair[0]})"),
                zip(hq, subsets),
            )
        )
    merged = merge_cfps(per_cluster, dataset) if per_cluster else CfpSet([], absolute)
    t2 = time.perf_counter()
    table = build_code_table(dataset, merged, cfg.epsilon)
    t3 = time.perf_counter()

    report = _report(
        CLUSTERED, dataset, cfg, merged, table,
        timings={"clustering": t1 - t0, "mining": t2 - t1, "table": t3 - t2},
    )
    report.cluster_qualities = [round(q, 6) for q in qualities]
    report.hq_clusters = hq
    report.lq_clusters = [k for k in range(len(qualities)) if k not in hq]
    report.hq_fallback = bool(qualities) and max(qualities) < cfg.quality_threshold
    return SelectionResult(table, report, merged, clustering)


def select(dataset: Dataset, cfg: PipelineConfig) -> SelectionResult:
    if cfg.method == KRIMP:
        return krimp_select(dataset, cfg)
    return clustered_select(dataset, cfg)


def _report(method, dataset, cfg, cfps, table, timings) -> SelectionReport:
    l_data = encoded_length_dataset(table, dataset)
    l_table = code_table_length(table)
    return SelectionReport(
        method=method,
        dataset_size=len(dataset),
        alphabet_size=dataset.alphabet_size,
        minsup_effective=cfg.minsup.resolve(len(dataset)),
        minsup_convention=cfg.minsup.convention,
        candidate_count=len(cfps),
        final_row_count=len(table),
        nonsingleton_count=table.nonsingleton_count(),
        encoded_dataset_bits=l_data,
        code_table_bits=l_table,
        total_length_bits=l_data + l_table,
        timings={k: round(v, 6) for k, v in timings.items()},
    )


def write_artifacts(
    out_dir: str | Path,
    prefix: str,
    table: CodeTable,
    report: SelectionReport,
    cfps: CfpSet | None = None,
    clustering: Clustering | None = None,
) -> dict[str, str]:
    """Write the stage artifacts of one selection run; returns name -> file."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {}
    table.save_json(out / f"{prefix}.codetable.json")
    files["codetable"] = f"{prefix}.codetable.json"
    report.to_json(out / f"{prefix}.report.json")
    files["report"] = f"{prefix}.report.json"
    if cfps is not None:
        write_cfp_file(cfps, out / f"{prefix}.cfps.txt")
        files["cfps"] = f"{prefix}.cfps.txt"
    if clustering is not None:
        write_clustering_file(clustering, out / f"{prefix}.clusters.txt")
        files["clusters"] = f"{prefix}.clusters.txt"
    return files


def write_manifest(out_dir: str | Path, params: dict, files: dict) -> None:
    payload = {"version": __version__, "params": params, "files": files}
    Path(out_dir, "manifest.json").write_text(
        json.dumps(payload, indent=1) + "\n", encoding="utf-8"
    )
