"""End-to-end CLI runs and exit codes."""

import json

import pytest

from mdltab.cli import main

EXAMPLE_1 = """\
1 2 3 4
1 2 3 4
2 3 4 5
2 3 4 5
3 4 5
3 4 5
4 5
"""


@pytest.fixture
def example1_file(tmp_path):
    path = tmp_path / "example1.txt"
    path.write_text(EXAMPLE_1)
    return path


@pytest.fixture
def synth_bundle(tmp_path):
    """Small trained bundle over quick synthetic data."""
    data_dir = tmp_path / "data"
    assert main([
        "synth", "--seed", "3", "--alphabet-size", "60",
        "--patterns-per-class", "3", "--pattern-length", "5", "--noise-items", "4",
        "--train-size", "120", "--test-size", "30", "--out-dir", str(data_dir),
    ]) == 0
    bundle = tmp_path / "bundle"
    assert main([
        "train", "--method", "clustered", "--minsup-frac", "0.05",
        "--repulsion", "4", "--max-clusters", "4", "--quality-threshold", "0.05",
        "--labels", "benign", "malware",
        "--out-dir", str(bundle),
        str(data_dir / "class1_train.txt"), str(data_dir / "class2_train.txt"),
    ]) == 0
    return bundle, data_dir


def test_mine_example1(example1_file, tmp_path, capsys):
    out = tmp_path / "cfps.txt"
    code = main(["mine", "--minsup", "2", "--out", str(out), str(example1_file)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 7
    assert lines[0] == "sup=7: 4"


def test_mine_to_stdout(example1_file, capsys):
    assert main(["mine", "--minsup", "2", str(example1_file)]) == 0
    out = capsys.readouterr().out
    assert out.count("\n") == 7


def test_mine_densify_writes_mapping(example1_file, tmp_path):
    out = tmp_path / "cfps.txt"
    assert main(["mine", "--minsup", "2", "--densify", "--out", str(out), str(example1_file)]) == 0
    mapping = json.loads((tmp_path / "cfps.txt.mapping.json").read_text())
    assert mapping["dense_to_original"] == [1, 2, 3, 4, 5]


def test_cluster_example1(example1_file, tmp_path):
    out = tmp_path / "clusters.txt"
    assert main([
        "cluster", "--repulsion", "4", "--max-clusters", "2",
        "--out", str(out), str(example1_file),
    ]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == "cluster 0 quality=1.000000 size=8 width=4 members=0,1"


def test_train_and_classify(synth_bundle, tmp_path, capsys):
    bundle, data_dir = synth_bundle
    for name in ["meta.json", "class1.codetable.json", "class2.codetable.json",
                 "manifest.json", "class1.report.json", "class2.cfps.txt"]:
        assert (bundle / name).exists(), name
    out_csv = tmp_path / "labels.csv"
    assert main([
        "classify", "--out", str(out_csv), str(bundle), str(data_dir / "class2_test.txt"),
    ]) == 0
    rows = out_csv.read_text().splitlines()
    assert rows[0] == "index,label,len_class1_bits,len_class2_bits"
    labels = [r.split(",")[1] for r in rows[1:]]
    assert labels.count("malware") > len(labels) * 0.9


def test_classify_empty_line_input(synth_bundle, tmp_path):
    bundle, _ = synth_bundle
    data = tmp_path / "one_empty.txt"
    data.write_text("\n")
    out_csv = tmp_path / "out.csv"
    assert main(["classify", "--out", str(out_csv), str(bundle), str(data)]) == 0
    row = out_csv.read_text().splitlines()[1]
    # empty transaction: 0 bits under both tables, tie -> class2 label
    assert row == "0,malware,0,0"


def test_anomaly_with_calibration(synth_bundle, tmp_path):
    bundle, data_dir = synth_bundle
    out_csv = tmp_path / "scores.csv"
    assert main([
        "anomaly", "--bundle", str(bundle), "--class-index", "1",
        "--calibrate", str(data_dir / "class1_train.txt"), "--percentile", "0.99",
        "--out", str(out_csv), str(data_dir / "class1_test.txt"),
    ]) == 0
    rows = out_csv.read_text().splitlines()
    assert rows[0] == "index,bits,is_anomaly"
    flags = [int(r.split(",")[2]) for r in rows[1:]]
    assert sum(flags) <= len(flags) * 0.1


def test_anomaly_needs_threshold_source(synth_bundle, tmp_path):
    bundle, data_dir = synth_bundle
    code = main(["anomaly", "--bundle", str(bundle), str(data_dir / "class1_test.txt")])
    assert code == 1


def test_explain(synth_bundle, tmp_path, capsys):
    bundle, data_dir = synth_bundle
    manifest = json.loads((data_dir / "manifest.json").read_text())
    planted = manifest["planted_class2"][0]
    args = ["explain", str(bundle), "--items"] + [str(i) for i in planted]
    assert main(args) == 0
    out = capsys.readouterr().out
    assert "label: malware" in out
    assert "case:" in out
    json_path = tmp_path / "exp.json"
    assert main(args + ["--json", str(json_path)]) == 0
    payload = json.loads(json_path.read_text())
    assert payload["label"] == "malware"


def test_synth_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main([
            "synth", "--seed", "11", "--alphabet-size", "50",
            "--patterns-per-class", "2", "--pattern-length", "6",
            "--train-size", "40", "--test-size", "10", "--out-dir", str(out),
        ]) == 0
    for name in ["class1_train.txt", "class2_train.txt", "class1_test.txt",
                 "class2_test.txt", "manifest.json"]:
        assert (a / name).read_text() == (b / name).read_text()


def test_report_command(synth_bundle, capsys):
    bundle, _ = synth_bundle
    assert main(["report", str(bundle / "class1.report.json")]) == 0
    out = capsys.readouterr().out
    assert "method" in out and "total" in out


def test_usage_error_exit_1(example1_file):
    assert main(["mine", str(example1_file)]) == 1  # missing --minsup
    assert main(["mine", "--minsup", "2", "--minsup-frac", "0.1", str(example1_file)]) == 1


def test_data_error_exit_2(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 2 1\n")
    assert main(["mine", "--minsup", "1", str(bad)]) == 2
    missing = tmp_path / "nope.txt"
    assert main(["mine", "--minsup", "1", str(missing)]) == 2


def test_parameter_error_from_values(example1_file):
    assert main(["mine", "--minsup", "0", str(example1_file)]) == 1
    assert main(["cluster", "--max-clusters", "0", str(example1_file)]) == 1
