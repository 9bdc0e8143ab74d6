"""Rank AMS features by mutual information with the binary label.

Uses a synthetic table shaped like the real data, where SpO2 carries most of
the signal.  Pass a CSV path to rank a real file instead.
"""

import sys
import tempfile
from pathlib import Path

from amshd.data import LabelScheme, mutual_information
from amshd.pipeline import load_dataset
from amshd.synthetic import write_ams_like_csv

if len(sys.argv) > 1:
    path = sys.argv[1]
else:
    path = Path(tempfile.mkdtemp()) / "ams_like.csv"
    write_ams_like_csv(path, n_subjects=60, seed=0)

ds = load_dataset(path)
scores = mutual_information(ds.features, ds.labels(LabelScheme.BINARY))
for i in scores.ranking():
    print(f"{ds.feature_names[i]:<8} {scores.scores[i]:.4f}")
