import csv
import filecmp
import itertools
import os
import shutil
import subprocess
import sys

import numpy as np
import pytest

from amshd.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from amshd.synthetic import ams_like_table, write_ams_like_csv


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "ams.csv"
    write_ams_like_csv(path, n_subjects=30, seed=1)
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def same_tree(a, b, skip=("timing",)):
    names = sorted(n for n in os.listdir(a) if not any(s in n for s in skip))
    assert names == sorted(n for n in os.listdir(b) if not any(s in n for s in skip))
    match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    return not mismatch and not errors


# -- mi -------------------------------------------------------------------------


def test_mi_outputs(tmp_path, dataset):
    out = tmp_path / "mi"
    assert main(["mi", "--dataset", dataset, "--out", str(out)]) == EXIT_OK
    rows = read_csv(out / "mi_scores.csv")
    assert [r["feature"] for r in rows][0] == "SpO2"
    scores = [float(r["score"]) for r in rows]
    assert scores == sorted(scores, reverse=True)
    assert len(rows) == 10
    md = (out / "mi_scores.md").read_text()
    assert md.startswith("| Feature |") and "SpO2" in md
    assert (out / "manifest.txt").exists()


def test_mi_shuffled_labels_near_zero(tmp_path):
    rows = ams_like_table(n_subjects=250, seed=3)
    scores = np.random.default_rng(0).permutation([r["AMS_score"] for r in rows])
    for r, s in zip(rows, scores):
        r["AMS_score"] = int(s)
    path = tmp_path / "shuffled.csv"
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    out = tmp_path / "mi"
    assert main(["mi", "--dataset", str(path), "--out", str(out)]) == EXIT_OK
    assert all(float(r["score"]) < 0.05 for r in read_csv(out / "mi_scores.csv"))


def test_mi_raw_target(tmp_path, dataset):
    assert main(["mi", "--dataset", dataset, "--out", str(tmp_path), "--mi-target", "raw"]) == EXIT_OK


def test_missing_dataset_is_usage_error(tmp_path, capsys):
    assert main(["mi", "--out", str(tmp_path)]) == EXIT_USAGE
    assert "dataset" in capsys.readouterr().err


def test_nonexistent_dataset_is_data_error(tmp_path, capsys):
    assert main(["mi", "--dataset", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == EXIT_DATA
    assert "nope.csv" in capsys.readouterr().err


def test_schema_error_exit_code(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("Subject,Event\nS1,Sea level\n")
    assert main(["mi", "--dataset", str(bad), "--out", str(tmp_path / "o")]) == EXIT_DATA


def test_bad_flag_is_usage_error():
    assert main(["train", "--dim", "many"]) == EXIT_USAGE
    assert main(["fly"]) == EXIT_USAGE


# -- train / eval ---------------------------------------------------------------


def test_train_eval_roundtrip(tmp_path, dataset):
    out = str(tmp_path / "run")
    assert main(["train", "--dataset", dataset, "--out", out]) == EXIT_OK
    assert os.path.exists(os.path.join(out, "model.amshd"))
    assert main(["eval", "--dataset", dataset, "--out", out]) == EXIT_OK
    metrics = {(r["metric"], r["class"]): float(r["value"]) for r in read_csv(os.path.join(out, "metrics.csv"))}
    assert 0.0 <= metrics[("accuracy", "all")] <= 1.0
    confusion = read_csv(os.path.join(out, "confusion.csv"))
    assert len(confusion) == 2
    preds = read_csv(os.path.join(out, "predictions.csv"))
    total = sum(int(v) for r in confusion for k, v in r.items() if k != "true\\predicted")
    assert total == len(preds)
    acc = np.mean([int(r["correct"]) for r in preds])
    assert acc == pytest.approx(metrics[("accuracy", "all")], abs=1e-6)
    # listing grouped by subject
    runs = [s for s, _ in itertools.groupby(r["subject"] for r in preds)]
    assert len(runs) == len(set(runs))


def test_eval_twice_identical(tmp_path, dataset):
    out = str(tmp_path / "run")
    assert main(["train", "--dataset", dataset, "--out", out, "--variant", "symbolic"]) == EXIT_OK
    a = str(tmp_path / "a")
    args = ["eval", "--dataset", dataset, "--out", a, "--model", os.path.join(out, "model.amshd"), "--variant", "symbolic"]
    assert main(args) == EXIT_OK
    shutil.copytree(a, str(tmp_path / "first"))
    assert main(args) == EXIT_OK
    assert same_tree(a, str(tmp_path / "first"))


def test_eval_scheme_mismatch(tmp_path, dataset, capsys):
    out = str(tmp_path / "run")
    assert main(["train", "--dataset", dataset, "--out", out]) == EXIT_OK
    assert main(["eval", "--dataset", dataset, "--out", out, "--scheme", "multiclass"]) != EXIT_OK
    assert "binary" in capsys.readouterr().err


def test_eval_missing_model(tmp_path, dataset):
    assert main(["eval", "--dataset", dataset, "--out", str(tmp_path)]) == EXIT_DATA


def test_eval_corrupt_model(tmp_path, dataset):
    m = tmp_path / "m.amshd"
    m.write_bytes(b"NOTAMODEL")
    assert main(["eval", "--dataset", dataset, "--out", str(tmp_path), "--model", str(m)]) == EXIT_DATA


def test_subject_split_and_epochs(tmp_path, dataset):
    out = str(tmp_path / "run")
    args = ["--dataset", dataset, "--out", out, "--split", "subject", "--epochs", "3", "--scheme", "multiclass"]
    assert main(["train", *args]) == EXIT_OK
    assert main(["eval", *args]) == EXIT_OK
    preds = read_csv(os.path.join(out, "predictions.csv"))
    assert len({r["subject"] for r in preds}) == 6  # 20% of 30 subjects held out


# -- config and manifest --------------------------------------------------------


def test_config_precedence(tmp_path, dataset):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# comment\ndataset={dataset}\ndim=256\nsource=hadamard\nout={tmp_path / 'o'}\n")
    assert main(["train", "--config", str(cfg), "--dim", "512"]) == EXIT_OK
    manifest = (tmp_path / "o" / "manifest.txt").read_text().splitlines()
    assert "dim=512" in manifest and "source=hadamard" in manifest and "alpha=0.5" in manifest


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("dimension=5\n")
    assert main(["mi", "--config", str(cfg)]) == EXIT_USAGE


def test_manifest_reproduces_outputs(tmp_path, dataset):
    out = str(tmp_path / "first")
    assert main(["bench", "--dataset", dataset, "--out", out, "--dims", "128,512", "--sources", "sobol,pseudo"]) == EXIT_OK
    copy = str(tmp_path / "copy")
    os.rename(out, copy)
    assert main(["bench", "--config", os.path.join(copy, "manifest.txt")]) == EXIT_OK
    assert same_tree(out, copy)


def test_all_randomness_from_seed(tmp_path, dataset):
    runs = []
    for name, seed in (("a", 7), ("b", 7), ("c", 8)):
        out = str(tmp_path / name)
        assert main(["train", "--dataset", dataset, "--out", out, "--seed", str(seed)]) == EXIT_OK
        runs.append(open(os.path.join(out, "model.amshd"), "rb").read())
    assert runs[0] == runs[1]
    assert runs[0] != runs[2]


# -- bench ----------------------------------------------------------------------


def test_bench_grid_dedupe_and_errors(tmp_path, dataset, capsys):
    out = tmp_path / "b"
    code = main(["bench", "--dataset", dataset, "--out", str(out), "--dims", "128,0,128", "--sources", "pseudo,hadamard,pseudo"])
    assert code == EXIT_OK
    err = capsys.readouterr().err
    assert "duplicate dim" in err and "duplicate source" in err
    rows = read_csv(out / "bench.csv")
    assert len(rows) == 2 * 2 * 2  # schemes x sources x dims
    bad = [r for r in rows if r["dim"] == "0"]
    assert bad and all(r["status"].startswith("error") for r in bad)
    assert all(r["status"] == "ok" for r in rows if r["dim"] == "128")
    timing = read_csv(out / "bench_timing.csv")
    assert len(timing) == len(rows)
    assert (out / "bench.md").read_text().count("\n") == len(rows) + 2


def test_bench_parallel_matches_serial(tmp_path, dataset):
    args = ["--dataset", dataset, "--dims", "128,256", "--sources", "sobol,hadamard"]
    assert main(["bench", *args, "--out", str(tmp_path / "s")]) == EXIT_OK
    assert main(["bench", *args, "--out", str(tmp_path / "p"), "--workers", "2"]) == EXIT_OK
    assert (tmp_path / "s" / "bench.csv").read_bytes() == (tmp_path / "p" / "bench.csv").read_bytes()


def test_bench_rejects_unknown_source(tmp_path, dataset):
    assert main(["bench", "--dataset", dataset, "--out", str(tmp_path), "--sources", "dice"]) == EXIT_USAGE


# -- orthohist ------------------------------------------------------------------


@pytest.mark.parametrize("source", ["pseudo", "sobol", "hadamard"])
def test_orthohist(tmp_path, source):
    out = tmp_path / "h"
    assert main(["orthohist", "--out", str(out), "--dims", "1000,10000", "--source", source, "--count", "100"]) == EXIT_OK
    summary = {(r["kind"], int(r["dim"])): r for r in read_csv(out / "ortho_summary.csv")}
    assert 0.47 <= float(summary[("position", 1000)]["mean"]) <= 0.53
    assert float(summary[("position", 10000)]["std"]) < float(summary[("position", 1000)]["std"])
    feat = read_csv(out / "ortho_feature_D1000.csv")
    frac = np.array([float(r["fraction"]) for r in feat])
    assert frac.sum() == pytest.approx(1.0, abs=1e-4)
    assert frac[: len(frac) // 2].sum() > 0.7  # mass at small distances
    assert frac[:5].sum() > frac[-5:].sum()


def test_orthohist_needs_two(tmp_path):
    assert main(["orthohist", "--out", str(tmp_path), "--count", "1"]) == EXIT_USAGE


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "amshd", "orthohist", "--out", str(tmp_path), "--dims", "64", "--count", "4"],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "ortho_position_D64.csv").exists()
