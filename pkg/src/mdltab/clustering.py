"""Transactional clustering by profit maximisation.

Clusters are grown to maximise a global criterion rewarding tall, narrow
clusters: ``profit = sum_i (S_i / W_i^r) |C_i| / sum_i |C_i|`` where S is the
total item occurrence count of a cluster, W the number of distinct items and
r the repulsion factor.  Two phases: an allocation scan placing each
transaction in the best existing or new cluster, then refinement passes that
move transactions while any move strictly improves the profit.

Each cluster is scored by ``quality = (S/W) / |C|`` in (0, 1]; 1.0 means all
member transactions are identical.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .data import Dataset, Transaction
from .errors import ContractError, ParameterError

logger = logging.getLogger(__name__)

REFINEMENT_PASS_CAP = 50


@dataclass
class Cluster:
    """One cluster: member transaction indices plus incremental statistics."""

    member_indices: list[int] = field(default_factory=list)
    occurrence: dict[int, int] = field(default_factory=dict)
    size_s: int = 0

    def __len__(self) -> int:
        return len(self.member_indices)

    @property
    def width_w(self) -> int:
        return len(self.occurrence)

    @property
    def height(self) -> float:
        if not self.member_indices:
            raise ContractError("height is undefined for an empty cluster")
        if self.size_s == 0:
            return 0.0
        return self.size_s / self.width_w

    def add(self, index: int, t: Transaction) -> None:
        self.member_indices.append(index)
        self.size_s += len(t)
        for i in t:
            self.occurrence[i] = self.occurrence.get(i, 0) + 1

    def remove(self, index: int, t: Transaction) -> None:
        self.member_indices.remove(index)
        self.size_s -= len(t)
        for i in t:
            c = self.occurrence[i] - 1
            if c:
                self.occurrence[i] = c
            else:
                del self.occurrence[i]


@dataclass
class Clustering:
    """A partition of a dataset's transaction indices into non-empty clusters."""

    clusters: list[Cluster]
    assignment: list[int]
    repulsion: float
    max_clusters: int

    def qualities(self) -> list[float]:
        return [cluster_quality(c) for c in self.clusters]


def _numerator_term(size_s: int, width_w: int, count: int, r: float) -> float:
    if count == 0 or size_s == 0:
        return 0.0
    return size_s / width_w**r * count


def profit(clustering: Clustering, r: float) -> float:
    """Value of the global criterion for an existing partition."""
    if r <= 0:
        raise ParameterError("repulsion factor must be positive")
    total = 0
    num = 0.0
    for c in clustering.clusters:
        if not c.member_indices:
            raise ContractError("profit is undefined with an empty cluster present")
        num += _numerator_term(c.size_s, c.width_w, len(c), r)
        total += len(c)
    return num / total


def delta_profit_add(cluster: Cluster, t: Transaction, r: float) -> float:
    """Profit-numerator change from adding ``t`` to ``cluster``.

    O(|t|) via the occurrence map; an empty cluster models "create new".
    """
    new_s = cluster.size_s + len(t)
    new_w = cluster.width_w + sum(1 for i in t if i not in cluster.occurrence)
    before = _numerator_term(cluster.size_s, cluster.width_w, len(cluster), r)
    after = _numerator_term(new_s, new_w, len(cluster) + 1, r)
    return after - before


def delta_profit_remove(cluster: Cluster, t: Transaction, r: float) -> float:
    """Profit-numerator change from removing a member transaction."""
    new_s = cluster.size_s - len(t)
    new_w = cluster.width_w - sum(1 for i in t if cluster.occurrence.get(i) == 1)
    before = _numerator_term(cluster.size_s, cluster.width_w, len(cluster), r)
    after = _numerator_term(new_s, new_w, len(cluster) - 1, r)
    return after - before


def cluster_quality(cluster: Cluster) -> float:
    """Height over member count; 1.0 iff all members are identical."""
    if not cluster.member_indices:
        raise ContractError("quality is undefined for an empty cluster")
    if cluster.size_s == 0:
        # every member is the empty transaction; identical members rate 1.0
        return 1.0
    return cluster.height / len(cluster)


def cluster(dataset: Dataset, r: float = 4.0, max_clusters: int = 8) -> Clustering:
    """Partition a dataset by allocation plus refinement.

    Allocation scans transactions in source order and places each one where
    the profit gain is largest, opening a new cluster only when that strictly
    beats every existing cluster and the cluster cap allows it.  Refinement
    rescans and moves transactions on strict improvement until a full pass
    makes no move (bounded by REFINEMENT_PASS_CAP).
    """
    if max_clusters < 1:
        raise ParameterError("max_clusters must be at least 1")
    if r <= 0:
        raise ParameterError("repulsion factor must be positive")

    clusters: list[Cluster] = []
    assignment = [-1] * len(dataset)

    # allocation phase
    for idx, t in enumerate(dataset.transactions):
        best_k, best_delta = -1, float("-inf")
        for k, c in enumerate(clusters):
            d = delta_profit_add(c, t, r)
            if d > best_delta:
                best_k, best_delta = k, d
        if len(clusters) < max_clusters:
            d_new = delta_profit_add(Cluster(), t, r)
            if d_new > best_delta:
                best_k, best_delta = -1, d_new
                clusters.append(Cluster())
                best_k = len(clusters) - 1
        if best_k < 0:  # first transaction with max_clusters >= 1
            clusters.append(Cluster())
            best_k = 0
        clusters[best_k].add(idx, t)
        assignment[idx] = best_k

    # refinement phase
    for pass_no in range(REFINEMENT_PASS_CAP):
        moved = False
        for idx, t in enumerate(dataset.transactions):
            src = assignment[idx]
            gain_leave = delta_profit_remove(clusters[src], t, r)
            best_k, best_gain = src, 0.0
            for k, c in enumerate(clusters):
                if k == src:
                    continue
                g = gain_leave + delta_profit_add(c, t, r)
                if g > best_gain:
                    best_k, best_gain = k, g
            if len(clusters) < max_clusters and len(clusters[src]) > 1:
                g = gain_leave + delta_profit_add(Cluster(), t, r)
                if g > best_gain:
                    best_k, best_gain = -1, g
            if best_gain > 0.0:
                clusters[src].remove(idx, t)
                if best_k == -1:
                    clusters.append(Cluster())
                    best_k = len(clusters) - 1
                clusters[best_k].add(idx, t)
                assignment[idx] = best_k
                moved = True
                if not clusters[src].member_indices:
                    del clusters[src]
                    for j, a in enumerate(assignment):
                        if a > src:
                            assignment[j] = a - 1
        if not moved:
            break
    else:
        logger.warning("refinement did not settle within %d passes", REFINEMENT_PASS_CAP)

    return Clustering(clusters, assignment, r, max_clusters)


def clustering_to_text(clustering: Clustering) -> str:
    """One line per cluster: quality, size, width and member indices."""
    lines = []
    for k, c in enumerate(clustering.clusters):
        members = ",".join(str(j) for j in sorted(c.member_indices))
        lines.append(
            f"cluster {k} quality={cluster_quality(c):.6f} "
            f"size={c.size_s} width={c.width_w} members={members}\n"
        )
    return "".join(lines)


def write_clustering_file(clustering: Clustering, path: str | Path) -> None:
    Path(path).write_text(clustering_to_text(clustering), encoding="utf-8")
