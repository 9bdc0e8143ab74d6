"""CSV and Markdown writers for MI scores, evaluation results, sweeps and
orthogonality histograms.  Floats are written with fixed precision so that
reruns produce identical bytes."""

from __future__ import annotations

import csv
import os
from typing import Sequence

import numpy as np

from .classifier import EvalReport
from .data import MiScores
from .randomness import OrthoHistogram


def _fmt(x: float, places: int = 6) -> str:
    return f"{x:.{places}f}"


def write_mi(scores: MiScores, names: Sequence[str], csv_path, md_path) -> None:
    order = scores.ranking()
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", "score"])
        for j in order:
            w.writerow([names[j], _fmt(scores.scores[j])])
    top = max(float(scores.scores.max()), 1e-12)
    lines = [f"| Feature | MI (nats, k={scores.k}) | |", "|---|---:|---|"]
    for j in order:
        bar = "#" * int(round(30 * scores.scores[j] / top))
        lines.append(f"| {names[j]} | {scores.scores[j]:.3f} | `{bar}` |")
    with open(md_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_eval(report: EvalReport, class_names: Sequence[str], out_dir) -> None:
    with open(os.path.join(out_dir, "metrics.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "class", "value"])
        w.writerow(["accuracy", "all", _fmt(report.accuracy)])
        w.writerow(["macro_f1", "all", _fmt(report.macro_f1)])
        for i, c in enumerate(report.labels):
            name = class_names[c]
            w.writerow(["precision", name, _fmt(report.precision[i])])
            w.writerow(["recall", name, _fmt(report.recall[i])])
            w.writerow(["f1", name, _fmt(report.f1[i])])
    with open(os.path.join(out_dir, "confusion.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        names = [class_names[c] for c in report.labels]
        w.writerow(["true\\predicted"] + names)
        for name, row in zip(names, report.confusion):
            w.writerow([name] + [int(v) for v in row])


def write_predictions(rows: list[dict], path) -> None:
    """Per-sample listing grouped by subject, events in chronological order."""
    keys = ["subject", "event", "time", "ams_score", "true", "predicted", "correct"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in keys})


def write_table(rows: list[dict], columns: Sequence[str], csv_path, md_path=None) -> None:
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([r.get(c, "") for c in columns])
    if md_path is not None:
        lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
        lines += ["| " + " | ".join(str(r.get(c, "")) for c in columns) + " |" for r in rows]
        with open(md_path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def write_histogram(hist: OrthoHistogram, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "fraction"])
        for lo, hi, f in zip(hist.edges[:-1], hist.edges[1:], hist.fraction):
            w.writerow([_fmt(lo, 4), _fmt(hi, 4), _fmt(float(f))])


def fmt(x: float, places: int = 6) -> str:
    return _fmt(float(np.asarray(x)), places)
