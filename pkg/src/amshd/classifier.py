"""Associative-memory classifier: one hypervector per class, nearest by
Hamming (binary path) or cosine (bipolar path)."""

from __future__ import annotations

import struct
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import DataError, LabelScheme, NormStats, mutual_information, select_features
from .encoder import Encoder, EncoderConfig, Variant
from .hv import BinaryHV, BipolarHV, pack_bits, popcount
from .randomness import SourceKind

MAGIC = b"AMSHD"
FORMAT_VERSION = 1


@dataclass
class Model:
    config: EncoderConfig
    scheme: LabelScheme
    labels: tuple[int, ...]
    class_bits: np.ndarray  # c x D, 0/1; bipolar path reads 1 as +1
    format_version: int = FORMAT_VERSION
    _encoder: Encoder | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.class_bits = np.asarray(self.class_bits, dtype=np.uint8)
        if self.class_bits.shape != (len(self.labels), self.config.dim):
            raise ValueError("class_bits must be (n_classes, D)")
        if len(self.labels) < 2:
            raise ValueError("a model needs at least two classes")

    @property
    def encoder(self) -> Encoder:
        if self._encoder is None:
            self._encoder = Encoder(self.config)
        return self._encoder

    @property
    def metric(self) -> str:
        return "cosine" if self.config.variant is Variant.PROJECTION else "hamming"

    @property
    def class_hvs(self) -> list[BinaryHV] | list[BipolarHV]:
        if self.config.variant is Variant.SYMBOLIC:
            return [BinaryHV(b) for b in self.class_bits]
        return [BipolarHV(2 * b.astype(np.int8) - 1) for b in self.class_bits]

    def reordered(self, order: Sequence[int]) -> Model:
        order = list(order)
        return Model(self.config, self.scheme, tuple(self.labels[i] for i in order), self.class_bits[order])


# -- similarity ----------------------------------------------------------------


def _mismatches(query_bits: np.ndarray, class_bits: np.ndarray) -> np.ndarray:
    q = pack_bits(query_bits)
    c = pack_bits(class_bits)
    return popcount(q[:, None, :] ^ c[None, :, :])


def similarity_scores(model: Model, query_bits: np.ndarray, metric: str | None = None) -> np.ndarray:
    """``n x c`` scores: normalized Hamming or cosine (``1 - 2h``)."""
    metric = metric or model.metric
    h = _mismatches(np.atleast_2d(query_bits), model.class_bits) / model.config.dim
    if metric == "hamming":
        return h
    if metric == "cosine":
        return 1.0 - 2.0 * h
    raise ValueError(f"unknown metric {metric!r}")


def _decide(scores: np.ndarray, metric: str) -> np.ndarray:
    # argmin / argmax return the first index on ties -> lowest class index wins
    return np.argmin(scores, axis=1) if metric == "hamming" else np.argmax(scores, axis=1)


def predict_batch(model: Model, X, metric: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    metric = metric or model.metric
    q = model.encoder.query_bits(X)
    scores = similarity_scores(model, q, metric)
    return np.asarray(model.labels)[_decide(scores, metric)], scores


def predict(model: Model, row, metric: str | None = None) -> tuple[int, np.ndarray]:
    """Label of the most similar class and the per-class scores."""
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1:
        raise ValueError("predict takes a single feature row")
    labels, scores = predict_batch(model, row[None, :], metric)
    return int(labels[0]), scores[0]


# -- training --------------------------------------------------------------------


def _class_accumulators(R: np.ndarray, y: np.ndarray, labels: Sequence[int]) -> np.ndarray:
    return np.stack([R[y == c].sum(axis=0) for c in labels])


def train(
    X,
    y,
    config: EncoderConfig,
    scheme: LabelScheme = LabelScheme.BINARY,
    epochs: int = 0,
    mi_k: int = 3,
    feature_policy: str | int = "positive",
) -> Model:
    """One pass: encode, accumulate per class, binarize.

    When ``config`` has no feature selection yet, features are chosen by MI
    on ``X``/``y``; normalization statistics always come from ``X``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    scheme = LabelScheme.parse(scheme)
    labels = tuple(range(len(scheme.class_names)))
    stray = sorted(set(np.unique(y).tolist()) - set(labels))
    if stray:
        raise DataError(f"labels {stray} are outside the {scheme.name.lower()} scheme")
    absent = [c for c in labels if not np.any(y == c)]
    if absent:
        raise DataError(f"classes {absent} have no training samples")
    if config.selected_features is None:
        selected = select_features(mutual_information(X, y, k=mi_k), feature_policy)
    else:
        selected = np.asarray(config.selected_features)
        if selected.size == 0:
            raise DataError("empty feature selection")
    fitted = config.with_fit(selected, NormStats.fit(X[:, selected]))
    enc = Encoder(fitted)
    R = enc.encode(X)
    K = _class_accumulators(R, y, labels)
    model = Model(fitted, scheme, labels, enc.binarize(K), _encoder=enc)
    if epochs:
        model = optional_retrain(model, X, y, epochs)
    return model


def optional_retrain(model: Model, X, y, epochs: int, history: list | None = None) -> Model:
    """Perceptron-style refinement of the class accumulators.

    Each epoch adds every misclassified sample's representation to its true
    class and subtracts it from the predicted one, then re-binarizes.  Batch
    updates can oscillate, so the class HVs with the best training accuracy
    seen so far are kept ("pocket"); training accuracy of the returned model
    therefore never decreases with more epochs.  ``history`` (if given)
    receives that accuracy for the one-shot model and after every epoch run.
    """
    if epochs <= 0:
        return model
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    enc = model.encoder
    labels = np.asarray(model.labels)
    R = enc.encode(X)
    q = enc.query_bits(X)
    K = _class_accumulators(R, y, model.labels).astype(np.float64)
    row_of = {c: i for i, c in enumerate(model.labels)}

    def predictions(bits):
        probe = Model(model.config, model.scheme, model.labels, bits)
        return labels[_decide(similarity_scores(probe, q), probe.metric)]

    bits = model.class_bits
    pred = predictions(bits)
    best_bits, best_acc = bits, float(np.mean(pred == y))
    if history is not None:
        history.append(best_acc)
    for _ in range(epochs):
        wrong = np.flatnonzero(pred != y)
        if wrong.size == 0:
            break
        for i in wrong:
            K[row_of[int(y[i])]] += R[i]
            K[row_of[int(pred[i])]] -= R[i]
        bits = enc.binarize(K)
        pred = predictions(bits)
        acc = float(np.mean(pred == y))
        if acc > best_acc:
            best_bits, best_acc = bits, acc
        if history is not None:
            history.append(best_acc)
    if best_bits is model.class_bits:
        return model
    return Model(model.config, model.scheme, model.labels, best_bits, _encoder=enc)


# -- evaluation ------------------------------------------------------------------


@dataclass
class EvalReport:
    labels: tuple[int, ...]
    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    macro_f1: float
    confusion: np.ndarray  # rows: true class, columns: predicted class
    predictions: np.ndarray
    scores: np.ndarray
    inference_seconds: float


def _report(labels, y, pred, scores, seconds) -> EvalReport:
    labels = tuple(labels)
    idx = {c: i for i, c in enumerate(labels)}
    c = len(labels)
    cm = np.zeros((c, c), dtype=np.int64)
    for t, p in zip(y, pred):
        cm[idx[int(t)], idx[int(p)]] += 1
    tp = np.diag(cm).astype(np.float64)
    col = cm.sum(axis=0)
    row = cm.sum(axis=1)
    precision = np.divide(tp, col, out=np.zeros(c), where=col > 0)
    recall = np.divide(tp, row, out=np.zeros(c), where=row > 0)
    denom = precision + recall
    f1 = np.divide(2 * precision * recall, denom, out=np.zeros(c), where=denom > 0)
    accuracy = float(np.trace(cm) / cm.sum())
    return EvalReport(labels, accuracy, precision, recall, f1, float(f1.mean()), cm, pred, scores, seconds)


def evaluate(model: Model, X, y, metric: str | None = None) -> EvalReport:
    y = np.asarray(y, dtype=np.int64)
    if y.size == 0:
        raise DataError("empty test split")
    t0 = time.perf_counter()
    pred, scores = predict_batch(model, X, metric)
    return _report(model.labels, y, pred, scores, time.perf_counter() - t0)


def noise_robustness(model: Model, X, y, flip_rate: float, seed: int = 0) -> EvalReport:
    """Evaluate with each query bit flipped independently with ``flip_rate``."""
    if not 0.0 <= flip_rate <= 0.5:
        raise ValueError("flip_rate must be in [0, 0.5]")
    y = np.asarray(y, dtype=np.int64)
    t0 = time.perf_counter()
    q = model.encoder.query_bits(X)
    flips = np.random.default_rng(seed).random(q.shape) < flip_rate
    q = q ^ flips.astype(np.uint8)
    scores = similarity_scores(model, q)
    pred = np.asarray(model.labels)[_decide(scores, model.metric)]
    return _report(model.labels, y, pred, scores, time.perf_counter() - t0)


# -- serialization ----------------------------------------------------------------


class ModelFormatError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


def to_bytes(model: Model) -> bytes:
    cfg = model.config
    out = bytearray()
    out += MAGIC
    out += struct.pack("<HBBIdQ", FORMAT_VERSION, int(cfg.variant), int(cfg.source), cfg.dim, cfg.alpha, cfg.seed)
    sel = cfg.selected_features
    out += struct.pack("<H", len(sel))
    out += struct.pack(f"<{len(sel)}H", *sel)
    st = cfg.norm_stats
    for j in range(len(sel)):
        out += struct.pack("<4d", st.mean[j], st.std[j], st.min[j], st.max[j])
    out += struct.pack("<BH", int(model.scheme), len(model.labels))
    for label, bits in zip(model.labels, model.class_bits):
        out += struct.pack("<H", label)
        if cfg.variant is Variant.SYMBOLIC:
            out += BinaryHV(bits).to_bytes()
        else:
            out += bits.astype(np.uint8).tobytes()
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str, what: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise ModelFormatError(f"truncated file while reading {what}", self.pos)
        vals = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return vals

    def raw(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError(f"truncated file while reading {what}", self.pos)
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk


def from_bytes(data: bytes) -> Model:
    r = _Reader(data)
    if r.raw(len(MAGIC), "magic") != MAGIC:
        raise ModelFormatError("bad magic, not an AMSHD model file", 0)
    at = r.pos
    version, variant, source, dim, alpha, seed = r.take("<HBBIdQ", "header")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {version}", at)
    try:
        variant = Variant(variant)
        source = SourceKind(source)
    except ValueError as e:
        raise ModelFormatError(str(e), at + 2) from None
    (n_feat,) = r.take("<H", "feature count")
    sel = r.take(f"<{n_feat}H", "feature indices")
    stats = np.array([r.take("<4d", "normalization stats") for _ in range(n_feat)]).reshape(n_feat, 4)
    at = r.pos
    scheme, n_cls = r.take("<BH", "class header")
    try:
        scheme = LabelScheme(scheme)
    except ValueError as e:
        raise ModelFormatError(str(e), at) from None
    labels, rows = [], []
    for _ in range(n_cls):
        (label,) = r.take("<H", "class label")
        labels.append(label)
        if variant is Variant.SYMBOLIC:
            rows.append(BinaryHV.from_bytes(r.raw((dim + 7) // 8, "class HV"), dim).bits)
        else:
            at = r.pos
            b = np.frombuffer(r.raw(dim, "class HV"), dtype=np.uint8)
            if np.any(b > 1):
                raise ModelFormatError("bipolar class HV bytes must be 0x00 or 0x01", at)
            rows.append(b.copy())
    if r.pos != len(data):
        raise ModelFormatError("trailing bytes after last class", r.pos)
    ns = NormStats(stats[:, 0].copy(), stats[:, 1].copy(), stats[:, 2].copy(), stats[:, 3].copy())
    cfg = EncoderConfig(dim, source, variant, seed, alpha, tuple(sel), ns)
    return Model(cfg, scheme, tuple(labels), np.array(rows, dtype=np.uint8).reshape(n_cls, dim))


def save(model: Model, path) -> None:
    with open(path, "wb") as fh:
        fh.write(to_bytes(model))


def load(path) -> Model:
    with open(path, "rb") as fh:
        return from_bytes(fh.read())
