"""Compression-based classification, anomaly scoring and explanations.

A two-class classifier is a pair of code tables trained on the per-class
datasets over a shared alphabet.  A test transaction goes to the class whose
table encodes it in fewer bits; ties follow the configured tie policy.
Because both tables keep every singleton of the shared alphabet, an item the
other class never exhibited still has a (long, epsilon-priced) code, so such
items penalise the class that has never seen them.

Items outside the shared alphabet follow the escape policy: ``escape-cost``
charges a fixed per-item price as if the item were one more epsilon-usage
row, ``ignore`` drops them (counted).

Anomaly detection trains a single table on normal data and flags any
transaction whose encoded length exceeds a threshold calibrated as a
percentile of the training lengths.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .codetable import CodeTable, Cover, _ceil_log2_exact, cover, encoded_length_transaction
from .data import Dataset, Transaction
from .errors import ParameterError
from .pipeline import PipelineConfig, SelectionReport, SelectionResult, select

TIE_CLASS1 = "class1"
TIE_CLASS2 = "class2"
ESCAPE_COST = "escape-cost"
ESCAPE_IGNORE = "ignore"

CASE_LONG_PATTERNS = "case1-long-patterns"
CASE_SHORTER_CODES = "case2-shorter-codes"
CASE_UNSUPPORTED_ITEMS = "case3-unsupported-items"
CASE_MIXED = "mixed"


@dataclass
class Classifier:
    """Two per-class code tables plus decision policies."""

    table_1: CodeTable
    table_2: CodeTable
    labels: tuple[str, str] = ("class1", "class2")
    tie_policy: str = TIE_CLASS2
    escape_policy: str = ESCAPE_COST
    item_names: list[str] | None = None
    reports: tuple[SelectionReport, SelectionReport] | None = None
    stats: dict = field(default_factory=lambda: {"ignored_items": 0})

    def __post_init__(self):
        if self.labels[0] == self.labels[1]:
            raise ParameterError("class labels must be distinct")
        if self.tie_policy not in (TIE_CLASS1, TIE_CLASS2):
            raise ParameterError(f"unknown tie policy {self.tie_policy!r}")
        if self.escape_policy not in (ESCAPE_COST, ESCAPE_IGNORE):
            raise ParameterError(f"unknown escape policy {self.escape_policy!r}")

    @property
    def alphabet_size(self) -> int:
        return self.table_1.alphabet_size


def escape_bits(table: CodeTable) -> int:
    """Per-item charge for items outside the alphabet: the code length one
    more epsilon-usage row would have received."""
    eps = table.epsilon
    return _ceil_log2_exact(table.training_total_usage + eps, eps)


def _split_known(classifier: Classifier, t: Iterable[int]) -> tuple[Transaction, list[int]]:
    known, unknown = [], []
    for i in sorted(set(t)):
        (known if 0 <= i < classifier.alphabet_size else unknown).append(i)
    return tuple(known), unknown


def _lengths(classifier: Classifier, t: Iterable[int]) -> tuple[float, float, Transaction, list[int]]:
    known, unknown = _split_known(classifier, t)
    l1 = encoded_length_transaction(classifier.table_1, known)
    l2 = encoded_length_transaction(classifier.table_2, known)
    if unknown:
        if classifier.escape_policy == ESCAPE_COST:
            l1 += len(unknown) * escape_bits(classifier.table_1)
            l2 += len(unknown) * escape_bits(classifier.table_2)
        else:
            classifier.stats["ignored_items"] += len(unknown)
    return l1, l2, known, unknown


def classify(classifier: Classifier, t: Iterable[int]) -> tuple[str, float, float]:
    """Label plus both encoded lengths; class 2 wins strictly shorter
    encodings, ties go to the tie policy's class."""
    l1, l2, _, _ = _lengths(classifier, t)
    if l2 < l1:
        label = classifier.labels[1]
    elif l1 < l2:
        label = classifier.labels[0]
    else:
        label = classifier.labels[1] if classifier.tie_policy == TIE_CLASS2 else classifier.labels[0]
    return label, l1, l2


def classify_batch(classifier: Classifier, dataset: Dataset) -> list[tuple[str, float, float]]:
    return [classify(classifier, t) for t in dataset.transactions]


def _union_alphabet(d1: Dataset, d2: Dataset) -> tuple[Dataset, Dataset, list[str] | None]:
    """Rebuild both datasets over the union alphabet.

    Named alphabets are united by name (class-2 columns are remapped);
    unnamed ones simply share the larger id space.
    """
    if d1.item_names is not None and d2.item_names is not None and d1.item_names != d2.item_names:
        names = list(d1.item_names)
        index = {n: i for i, n in enumerate(names)}
        remap = []
        for n in d2.item_names:
            if n not in index:
                index[n] = len(names)
                names.append(n)
            remap.append(index[n])
        m = len(names)
        nd1 = Dataset(d1.transactions, m, names)
        nd2 = Dataset(
            [tuple(sorted(remap[i] for i in t)) for t in d2.transactions], m, names
        )
        return nd1, nd2, names
    m = max(d1.alphabet_size, d2.alphabet_size)
    names = d1.item_names if d1.item_names is not None else d2.item_names
    if names is not None and len(names) < m:
        names = names + [str(i) for i in range(len(names), m)]
    nd1 = Dataset(d1.transactions, m, names)
    nd2 = Dataset(d2.transactions, m, names)
    return nd1, nd2, names


def train(
    dataset_1: Dataset,
    dataset_2: Dataset,
    cfg: PipelineConfig,
    labels: tuple[str, str] = ("class1", "class2"),
    tie_policy: str = TIE_CLASS2,
    escape_policy: str = ESCAPE_COST,
) -> tuple[Classifier, SelectionResult, SelectionResult]:
    """Fit one code table per class over the shared alphabet."""
    d1, d2, names = _union_alphabet(dataset_1, dataset_2)
    res1 = select(d1, cfg)
    res2 = select(d2, cfg)
    clf = Classifier(
        res1.table,
        res2.table,
        labels=labels,
        tie_policy=tie_policy,
        escape_policy=escape_policy,
        item_names=names,
        reports=(res1.report, res2.report),
    )
    return clf, res1, res2


@dataclass
class AnomalyModel:
    """A normal-data code table plus the alarm threshold in bits."""

    table: CodeTable
    theta: float

    def __post_init__(self):
        if self.theta < 0:
            raise ParameterError("theta must be non-negative")


def train_anomaly(
    dataset: Dataset, cfg: PipelineConfig, percentile: float = 0.99
) -> tuple[AnomalyModel, SelectionResult]:
    """Fit a table on normal data; theta is the given percentile of the
    training encoded lengths (1.0 = the maximum, flags nothing seen)."""
    if not 0 < percentile <= 1:
        raise ParameterError("percentile must lie in (0, 1]")
    res = select(dataset, cfg)
    lengths = sorted(encoded_length_transaction(res.table, t) for t in dataset.transactions)
    idx = max(0, math.ceil(percentile * len(lengths)) - 1)
    return AnomalyModel(res.table, float(lengths[idx])), res


def anomaly_score(model: AnomalyModel, t: Iterable[int]) -> tuple[float, bool]:
    """Encoded length under the normal model; anomalous when strictly above theta."""
    known = [i for i in sorted(set(t)) if 0 <= i < model.table.alphabet_size]
    unknown = len(set(t)) - len(known)
    bits = encoded_length_transaction(model.table, known)
    if unknown:
        bits += unknown * escape_bits(model.table)
    return bits, bits > model.theta


@dataclass
class Explanation:
    """Contrastive account of one classification."""

    label: str
    lengths: tuple[float, float]
    covers: tuple[list[Transaction], list[Transaction]]
    part_bits: tuple[list[int], list[int]]
    absent_items: tuple[list[int], list[int]]
    unknown_items: list[int]
    case: str

    def render(self, item_names: Sequence[str] | None = None) -> str:
        def fmt(items):
            if item_names is not None:
                return "{" + ", ".join(item_names[i] for i in items) + "}"
            return "{" + ", ".join(str(i) for i in items) + "}"

        out = [f"label: {self.label}", f"case: {self.case}"]
        for k in (0, 1):
            parts = " + ".join(
                f"{fmt(p)}:{b}b" for p, b in zip(self.covers[k], self.part_bits[k])
            )
            out.append(f"class{k + 1}: {self.lengths[k]:.0f} bits = {parts or '(empty)'}")
            if self.absent_items[k]:
                out.append(
                    f"class{k + 1} never exhibited: "
                    + ", ".join(fmt((i,)) for i in self.absent_items[k])
                )
        if self.unknown_items:
            out.append("outside both alphabets: " + ", ".join(map(str, self.unknown_items)))
        return "\n".join(out)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "len_class1_bits": self.lengths[0],
            "len_class2_bits": self.lengths[1],
            "cover_class1": [list(p) for p in self.covers[0]],
            "cover_class2": [list(p) for p in self.covers[1]],
            "part_bits_class1": self.part_bits[0],
            "part_bits_class2": self.part_bits[1],
            "absent_class1": self.absent_items[0],
            "absent_class2": self.absent_items[1],
            "unknown_items": self.unknown_items,
            "case": self.case,
        }


def explain(classifier: Classifier, t: Iterable[int]) -> Explanation:
    """Why one class encodes the transaction more cheaply than the other.

    Case 3: some item was never seen in exactly one class's training data.
    Case 1: the winning cover contains a clearly longer pattern (>= 2 items
    longer than anything in the losing cover).  Case 2: same shape, shorter
    codes on the winning side.
    """
    label, l1, l2 = classify(classifier, t)
    known, unknown = _split_known(classifier, t)
    covers: list[Cover] = [cover(classifier.table_1, known), cover(classifier.table_2, known)]
    part_bits = [
        [classifier.table_1.rows[r].code_length_bits for r in covers[0].row_indices],
        [classifier.table_2.rows[r].code_length_bits for r in covers[1].row_indices],
    ]
    absent = ([], [])
    for i in known:
        sup1 = _singleton_support(classifier.table_1, i)
        sup2 = _singleton_support(classifier.table_2, i)
        if sup1 == 0:
            absent[0].append(i)
        if sup2 == 0:
            absent[1].append(i)

    case3 = any(
        (i in absent[0]) != (i in absent[1]) for i in known
    )
    if case3:
        case = CASE_UNSUPPORTED_ITEMS
    else:
        win, lose = (1, 0) if label == classifier.labels[1] else (0, 1)
        longest_win = max((len(p) for p in covers[win].parts), default=0)
        longest_lose = max((len(p) for p in covers[lose].parts), default=0)
        case = CASE_LONG_PATTERNS if longest_win - longest_lose >= 2 else CASE_SHORTER_CODES

    return Explanation(
        label=label,
        lengths=(l1, l2),
        covers=(covers[0].parts, covers[1].parts),
        part_bits=(part_bits[0], part_bits[1]),
        absent_items=absent,
        unknown_items=unknown,
        case=case,
    )


def _singleton_support(table: CodeTable, item: int) -> int:
    row = table.row_for((item,))
    return row.support if row is not None else 0


def save_bundle(classifier: Classifier, out_dir: str | Path) -> None:
    """Model bundle: both tables, labels, policies and a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    classifier.table_1.save_json(out / "class1.codetable.json")
    classifier.table_2.save_json(out / "class2.codetable.json")
    meta = {
        "version": __version__,
        "labels": list(classifier.labels),
        "tie_policy": classifier.tie_policy,
        "escape_policy": classifier.escape_policy,
        "epsilon": classifier.table_1.epsilon,
        "item_names": classifier.item_names,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=1) + "\n", encoding="utf-8")


def load_bundle(bundle_dir: str | Path) -> Classifier:
    bundle = Path(bundle_dir)
    meta = json.loads((bundle / "meta.json").read_text(encoding="utf-8"))
    return Classifier(
        CodeTable.load_json(bundle / "class1.codetable.json"),
        CodeTable.load_json(bundle / "class2.codetable.json"),
        labels=tuple(meta["labels"]),
        tie_policy=meta["tie_policy"],
        escape_policy=meta["escape_policy"],
        item_names=meta["item_names"],
    )
