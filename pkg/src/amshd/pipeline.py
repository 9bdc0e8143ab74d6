"""Dataset -> split -> fitted model, shared by the CLI and the demos."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import Model, train
from .data import (
    FEATURE_NAMES,
    Dataset,
    LabelScheme,
    MiScores,
    SplitMode,
    SplitSpec,
    build_dataset,
    load_csv,
    mutual_information,
    select_features,
    split,
)
from .encoder import EncoderConfig

SUBJECT_COLUMN = FEATURE_NAMES.index("Subject")


@dataclass
class Prepared:
    dataset: Dataset
    scheme: LabelScheme
    labels: np.ndarray
    train_idx: np.ndarray
    test_idx: np.ndarray
    split_spec: SplitSpec

    @property
    def X_train(self) -> np.ndarray:
        return self.dataset.features[self.train_idx]

    @property
    def y_train(self) -> np.ndarray:
        return self.labels[self.train_idx]

    @property
    def X_test(self) -> np.ndarray:
        return self.dataset.features[self.test_idx]

    @property
    def y_test(self) -> np.ndarray:
        return self.labels[self.test_idx]


def load_dataset(path) -> Dataset:
    return build_dataset(load_csv(path))


def prepare(dataset: Dataset, scheme: LabelScheme, spec: SplitSpec) -> Prepared:
    scheme = LabelScheme.parse(scheme)
    y = dataset.labels(scheme)
    tr, te = split(y, spec, subjects=dataset.subjects)
    return Prepared(dataset, scheme, y, tr, te, spec)


def training_mi(prep: Prepared, k: int = 3) -> MiScores:
    """MI on the training partition; Subject is zeroed under subject holdout
    because held-out people have no usable subject code."""
    scores = mutual_information(prep.X_train, prep.y_train, k=k)
    if prep.split_spec.mode is SplitMode.SUBJECT:
        s = scores.scores.copy()
        s[SUBJECT_COLUMN] = 0.0
        scores = MiScores(s, scores.k)
    return scores


def fit(prep: Prepared, config: EncoderConfig, k: int = 3, policy: str | int = "positive", epochs: int = 0) -> Model:
    selected = select_features(training_mi(prep, k), policy)
    cfg = EncoderConfig(config.dim, config.source, config.variant, config.seed, config.alpha, tuple(selected))
    return train(prep.X_train, prep.y_train, cfg, prep.scheme, epochs=epochs)
