"""MDL-selected code tables of itemset patterns for transactional data.

Mines closed frequent patterns, optionally routing the mining through
transactional clustering to tame pattern explosion, selects a compact code
table of patterns by a two-part description-length objective, and uses the
selected tables for interpretable two-class classification and anomaly
detection.
"""

__version__ = "0.1.0"

from .data import Dataset, Item, Pattern, densify, load_dataset, save_item_list
from .mining import CfpSet, MinSup, closure, core_index, mine_cfp, ppc_extensions
from .clustering import Clustering, cluster, cluster_quality, profit
from .codetable import (
    CodeTable,
    CodeTableRow,
    Cover,
    build_code_table,
    code_table_length,
    cover,
    encoded_length_dataset,
    encoded_length_transaction,
    recompute_usages,
    standard_code_table,
    total_length,
)
from .pipeline import (
    PipelineConfig,
    SelectionReport,
    SelectionResult,
    clustered_select,
    hq_select,
    krimp_select,
    merge_cfps,
)
from .classify import (
    AnomalyModel,
    Classifier,
    Explanation,
    anomaly_score,
    classify,
    explain,
    train,
    train_anomaly,
)

__all__ = [
    "__version__",
    "Dataset",
    "Item",
    "Pattern",
    "densify",
    "load_dataset",
    "save_item_list",
    "CfpSet",
    "MinSup",
    "closure",
    "core_index",
    "mine_cfp",
    "ppc_extensions",
    "Clustering",
    "cluster",
    "cluster_quality",
    "profit",
    "CodeTable",
    "CodeTableRow",
    "Cover",
    "build_code_table",
    "code_table_length",
    "cover",
    "encoded_length_dataset",
    "encoded_length_transaction",
    "recompute_usages",
    "standard_code_table",
    "total_length",
    "PipelineConfig",
    "SelectionReport",
    "SelectionResult",
    "clustered_select",
    "hq_select",
    "krimp_select",
    "merge_cfps",
    "AnomalyModel",
    "Classifier",
    "Explanation",
    "anomaly_score",
    "classify",
    "explain",
    "train",
    "train_anomaly",
]
