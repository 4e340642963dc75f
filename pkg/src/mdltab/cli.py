"""Command-line surface: mine, cluster, train, classify, anomaly, explain,
synth and report subcommands.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .classify import (
    AnomalyModel,
    anomaly_score,
    classify,
    explain,
    load_bundle,
    save_bundle,
    train,
)
from .clustering import cluster, clustering_to_text
from .codetable import CodeTable
from .data import ITEM_LIST, ONE_HOT_CSV, densify, load_dataset, save_item_list
from .errors import DataError, ParameterError
from .mining import MinSup, mine_cfp, write_cfp_file
from .pipeline import (
    CLUSTERED,
    KRIMP,
    PipelineConfig,
    SelectionReport,
    write_artifacts,
    write_manifest,
)
from .synth import SynthSpec, generate_two_class

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems must exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise ParameterError(message)


def _add_format(p):
    p.add_argument(
        "--format",
        choices=[ITEM_LIST, ONE_HOT_CSV],
        default=ITEM_LIST,
        help="input dataset format",
    )


def _add_minsup(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--minsup", type=float, help="absolute support threshold")
    group.add_argument(
        "--minsup-frac", type=float, help="threshold as a fraction of the dataset size"
    )
    p.add_argument(
        "--minsup-convention",
        choices=["ceil", "floor"],
        default="ceil",
        help="how fractional thresholds resolve to integers",
    )


def _add_pipeline_flags(p):
    _add_minsup(p)
    p.add_argument("--method", choices=[KRIMP, CLUSTERED], default=CLUSTERED)
    p.add_argument("--repulsion", type=float, default=4.0)
    p.add_argument("--max-clusters", type=int, default=8)
    p.add_argument("--quality-threshold", type=float, default=0.05)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--threads", type=int, default=None)


def _minsup_from(args) -> MinSup:
    if args.minsup is not None:
        return MinSup.absolute(args.minsup, args.minsup_convention)
    return MinSup.of_fraction(args.minsup_frac, args.minsup_convention)


def build_parser() -> _Parser:
    parser = _Parser(prog="mdltab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mdltab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine closed frequent patterns")
    _add_minsup(p)
    _add_format(p)
    p.add_argument("--densify", action="store_true", help="remap ids densely first")
    p.add_argument("--out", type=Path, help="CFP output file (default stdout)")
    p.add_argument("data", type=Path)

    p = sub.add_parser("cluster", help="partition a dataset")
    p.add_argument("--repulsion", type=float, default=4.0)
    p.add_argument("--max-clusters", type=int, default=8)
    _add_format(p)
    p.add_argument("--out", type=Path, help="clustering output file (default stdout)")
    p.add_argument("data", type=Path)

    p = sub.add_parser("train", help="train a two-class model bundle")
    _add_pipeline_flags(p)
    _add_format(p)
    p.add_argument("--labels", nargs=2, default=["class1", "class2"], metavar=("L1", "L2"))
    p.add_argument("--tie-policy", choices=["class1", "class2"], default="class2")
    p.add_argument("--escape-policy", choices=["escape-cost", "ignore"], default="escape-cost")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("data1", type=Path)
    p.add_argument("data2", type=Path)

    p = sub.add_parser("classify", help="label a dataset with a trained bundle")
    _add_format(p)
    p.add_argument("--out", type=Path, help="CSV output (default stdout)")
    p.add_argument("bundle", type=Path)
    p.add_argument("data", type=Path)

    p = sub.add_parser("anomaly", help="score a dataset against a normal-data table")
    _add_format(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--table", type=Path, help="code-table JSON file")
    src.add_argument("--bundle", type=Path, help="model bundle directory")
    p.add_argument("--class-index", type=int, choices=[1, 2], default=1,
                   help="which bundle table to use")
    p.add_argument("--theta", type=float, help="alarm threshold in bits")
    p.add_argument("--calibrate", type=Path, help="training data for percentile calibration")
    p.add_argument("--percentile", type=float, default=0.99)
    p.add_argument("--out", type=Path, help="CSV output (default stdout)")
    p.add_argument("data", type=Path)

    p = sub.add_parser("explain", help="explain the classification of one transaction")
    p.add_argument("--items", type=int, nargs="*", default=[], help="item ids")
    p.add_argument("--json", type=Path, help="also write the structured form here")
    p.add_argument("bundle", type=Path)

    p = sub.add_parser("synth", help="generate seeded two-class synthetic data")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--alphabet-size", type=int, default=200)
    p.add_argument("--patterns-per-class", type=int, default=5)
    p.add_argument("--pattern-length", type=int, default=8)
    p.add_argument("--noise-items", type=int, default=10)
    p.add_argument("--train-size", type=int, default=2000)
    p.add_argument("--test-size", type=int, default=500)
    p.add_argument("--out-dir", type=Path, required=True)

    p = sub.add_parser("report", help="print a human-readable selection report")
    p.add_argument("report", type=Path)

    return parser


def _write_or_print(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _cmd_mine(args) -> int:
    ds = load_dataset(args.data, args.format)
    mapping = None
    if args.densify:
        ds, mapping = densify(ds)
    cfps = mine_cfp(ds, _minsup_from(args))
    lines = [f"sup={p.support}: {' '.join(str(i) for i in p.items)}\n" for p in cfps]
    _write_or_print("".join(lines), args.out)
    if mapping is not None and args.out is not None:
        Path(str(args.out) + ".mapping.json").write_text(
            json.dumps({"dense_to_original": mapping}) + "\n", encoding="utf-8"
        )
    return EXIT_OK


def _cmd_cluster(args) -> int:
    ds = load_dataset(args.data, args.format)
    cl = cluster(ds, args.repulsion, args.max_clusters)
    _write_or_print(clustering_to_text(cl), args.out)
    return EXIT_OK


def _cmd_train(args) -> int:
    d1 = load_dataset(args.data1, args.format)
    d2 = load_dataset(args.data2, args.format)
    cfg = PipelineConfig(
        minsup=_minsup_from(args),
        repulsion=args.repulsion,
        max_clusters=args.max_clusters,
        quality_threshold=args.quality_threshold,
        method=args.method,
        epsilon=args.epsilon,
        threads=args.threads,
    )
    clf, res1, res2 = train(
        d1,
        d2,
        cfg,
        labels=tuple(args.labels),
        tie_policy=args.tie_policy,
        escape_policy=args.escape_policy,
    )
    out = args.out_dir
    files = {}
    for prefix, res in (("class1", res1), ("class2", res2)):
        written = write_artifacts(out, prefix, res.table, res.report, res.candidates, res.clustering)
        files.update({f"{prefix}_{kind}": name for kind, name in written.items()})
    save_bundle(clf, out)
    params = {
        "method": cfg.method,
        "minsup": {"value": cfg.minsup.value, "fraction": cfg.minsup.fraction,
                   "convention": cfg.minsup.convention},
        "repulsion": cfg.repulsion,
        "max_clusters": cfg.max_clusters,
        "quality_threshold": cfg.quality_threshold,
        "epsilon": cfg.epsilon,
        "labels": list(args.labels),
        "tie_policy": args.tie_policy,
        "escape_policy": args.escape_policy,
    }
    write_manifest(out, params, files)
    for name, res in (("class1", res1), ("class2", res2)):
        sys.stdout.write(f"[{name}]\n{res.report.summary()}\n")
    return EXIT_OK


def _cmd_classify(args) -> int:
    clf = load_bundle(args.bundle)
    ds = load_dataset(args.data, args.format)
    rows = ["index,label,len_class1_bits,len_class2_bits\n"]
    for idx, t in enumerate(ds.transactions):
        label, l1, l2 = classify(clf, t)
        rows.append(f"{idx},{label},{l1:.0f},{l2:.0f}\n")
    _write_or_print("".join(rows), args.out)
    return EXIT_OK


def _cmd_anomaly(args) -> int:
    if args.table is not None:
        table = CodeTable.load_json(args.table)
    else:
        clf = load_bundle(args.bundle)
        table = clf.table_1 if args.class_index == 1 else clf.table_2
    if args.theta is not None:
        model = AnomalyModel(table, args.theta)
    elif args.calibrate is not None:
        from .codetable import encoded_length_transaction
        import math

        train_ds = load_dataset(args.calibrate, args.format)
        lengths = sorted(
            encoded_length_transaction(table, t) for t in train_ds.transactions
        )
        idx = max(0, math.ceil(args.percentile * len(lengths)) - 1)
        model = AnomalyModel(table, float(lengths[idx]))
    else:
        raise ParameterError("anomaly needs either --theta or --calibrate")
    ds = load_dataset(args.data, args.format)
    rows = ["index,bits,is_anomaly\n"]
    for idx, t in enumerate(ds.transactions):
        bits, flag = anomaly_score(model, t)
        rows.append(f"{idx},{bits:.0f},{int(flag)}\n")
    _write_or_print("".join(rows), args.out)
    return EXIT_OK


def _cmd_explain(args) -> int:
    clf = load_bundle(args.bundle)
    exp = explain(clf, tuple(sorted(set(args.items))))
    sys.stdout.write(exp.render(clf.item_names) + "\n")
    if args.json is not None:
        args.json.write_text(json.dumps(exp.to_dict(), indent=1) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_synth(args) -> int:
    spec = SynthSpec(
        alphabet_size=args.alphabet_size,
        patterns_per_class=args.patterns_per_class,
        pattern_length=args.pattern_length,
        noise_items=args.noise_items,
        train_size=args.train_size,
        test_size=args.test_size,
        seed=args.seed,
    )
    data = generate_two_class(spec)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    save_item_list(data.train_1, out / "class1_train.txt")
    save_item_list(data.train_2, out / "class2_train.txt")
    save_item_list(data.test_1, out / "class1_test.txt")
    save_item_list(data.test_2, out / "class2_test.txt")
    manifest = {
        "version": __version__,
        "seed": spec.seed,
        "alphabet_size": spec.alphabet_size,
        "train_size": spec.train_size,
        "test_size": spec.test_size,
        "planted_class1": [list(p) for p in data.planted_1],
        "planted_class2": [list(p) for p in data.planted_2],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_report(args) -> int:
    report = SelectionReport.from_json(args.report)
    sys.stdout.write(report.summary() + "\n")
    return EXIT_OK


_COMMANDS = {
    "mine": _cmd_mine,
    "cluster": _cmd_cluster,
    "train": _cmd_train,
    "classify": _cmd_classify,
    "anomaly": _cmd_anomaly,
    "explain": _cmd_explain,
    "synth": _cmd_synth,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        logger.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
