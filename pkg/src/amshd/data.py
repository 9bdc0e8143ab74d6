"""Tabular AMS data: CSV ingestion, imputation, categorical encoding,
mutual-information feature scoring, labels, splits and normalization."""

from __future__ import annotations

import csv
import enum
import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import digamma

CATEGORICAL_COLUMNS = ("Subject", "Event", "Time")
NUMERIC_COLUMNS = ("SpO2", "HR", "CO_pct", "CO_ppm", "Psys", "Pdia", "Hct")
TARGET_COLUMN = "AMS_score"
REQUIRED_COLUMNS = CATEGORICAL_COLUMNS + NUMERIC_COLUMNS + (TARGET_COLUMN,)
FEATURE_NAMES = CATEGORICAL_COLUMNS + NUMERIC_COLUMNS
MISSING_TOKENS = {"", "na", "nan", "n/a", "null", "none"}

_FIELD = {
    "SpO2": "spo2_pct",
    "HR": "hr_bpm",
    "CO_pct": "co_pct",
    "CO_ppm": "co_ppm",
    "Psys": "psys",
    "Pdia": "pdia",
    "Hct": "hct",
}


class SchemaError(ValueError):
    """Input file does not follow the documented column layout."""


class DataError(ValueError):
    """Data content makes the requested computation impossible."""


@dataclass
class RawRecord:
    subject: str
    event: str
    time: str
    spo2_pct: float | None = None
    hr_bpm: float | None = None
    co_pct: float | None = None
    co_ppm: float | None = None
    psys: float | None = None
    pdia: float | None = None
    hct: float | None = None
    ams_score: int | None = None

    def numeric(self, column: str) -> float | None:
        return getattr(self, _FIELD[column])


def _is_missing(cell: str | None) -> bool:
    return cell is None or cell.strip().lower() in MISSING_TOKENS


def load_csv(path) -> list[RawRecord]:
    """Read the AMS table.  Header match is case-insensitive and order-free;
    extra columns are ignored."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        lookup = {h.strip().lower(): i for i, h in enumerate(header)}
        cols = {}
        for name in REQUIRED_COLUMNS:
            if name.lower() not in lookup:
                raise SchemaError(f"{path}: missing required column '{name}'")
            cols[name] = lookup[name.lower()]
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not any(c.strip() for c in row):
                continue
            get = lambda name: row[cols[name]] if cols[name] < len(row) else None  # noqa: E731
            ids = {}
            for name in CATEGORICAL_COLUMNS:
                cell = get(name)
                if _is_missing(cell):
                    raise SchemaError(f"{path}:{lineno}: empty identifier in column '{name}'")
                ids[name.lower()] = cell.strip()
            values = {}
            for name in NUMERIC_COLUMNS:
                cell = get(name)
                if _is_missing(cell):
                    values[_FIELD[name]] = None
                    continue
                try:
                    values[_FIELD[name]] = float(cell)
                except ValueError:
                    raise SchemaError(f"{path}:{lineno}: column '{name}': cannot parse {cell!r}") from None
            cell = get(TARGET_COLUMN)
            score = None
            if not _is_missing(cell):
                try:
                    f = float(cell)
                except ValueError:
                    raise SchemaError(f"{path}:{lineno}: column '{TARGET_COLUMN}': cannot parse {cell!r}") from None
                if f != int(f) or not 0 <= f <= 12:
                    raise SchemaError(f"{path}:{lineno}: AMS score {cell!r} outside 0..12")
                score = int(f)
            records.append(RawRecord(**ids, **values, ams_score=score))
    return records


# -- imputation ---------------------------------------------------------------


@dataclass(frozen=True)
class Imputation:
    row: int
    column: str
    value: float


def impute_missing_mean(records: Sequence[RawRecord]) -> tuple[np.ndarray, list[Imputation]]:
    """Numeric columns as an ``m x 7`` matrix with gaps filled by column means."""
    m = len(records)
    X = np.full((m, len(NUMERIC_COLUMNS)), np.nan)
    for i, r in enumerate(records):
        for j, name in enumerate(NUMERIC_COLUMNS):
            v = r.numeric(name)
            if v is not None:
                X[i, j] = v
    log = []
    for j, name in enumerate(NUMERIC_COLUMNS):
        gaps = np.isnan(X[:, j])
        if not gaps.any():
            continue
        if gaps.all():
            raise DataError(f"column '{name}' has no values to impute from")
        mean = float(np.mean(X[~gaps, j]))
        X[gaps, j] = mean
        log.extend(Imputation(int(i), name, mean) for i in np.flatnonzero(gaps))
    return X, log


# -- categorical encoding -----------------------------------------------------

_TIME_WORDS = {"am": 0, "morning": 0, "noon": 1, "midday": 1, "pm": 2, "afternoon": 2, "evening": 3, "night": 4}


def _norm(label: str) -> str:
    return re.sub(r"[\s_\-]+", " ", label.strip().lower())


def _natural_key(label: str):
    parts = re.split(r"(\d+(?:\.\d+)?)", _norm(label))
    return tuple((0, float(p), "") if i % 2 else (1, 0.0, p) for i, p in enumerate(parts) if p)


def event_rank(label: str) -> float | None:
    """Chronological rank of a known event label (baseline first)."""
    s = _norm(label)
    if s in {"baseline", "sea level", "baseline sea level", "sealevel", "sl", "bl"}:
        return 0.0
    if s in {"high altitude", "altitude", "ha"}:
        return 1.0
    m = re.fullmatch(r"(over ?night|night)\s*(\d+)", s)
    if m:
        k = int(m.group(2))
        return 2.0 * k + (1.0 if m.group(1).startswith("over") else 0.0)
    m = re.fullmatch(r"(?:event\s*)?(\d+)", s)
    if m:
        return float(int(m.group(1)) - 1)
    return None


def time_rank(label: str) -> float | None:
    s = _norm(label)
    if s in _TIME_WORDS:
        return float(_TIME_WORDS[s])
    try:
        return float(s)
    except ValueError:
        pass
    m = re.fullmatch(r"(\d{1,2}):(\d{2})(?::\d{2})?", s)
    if m:
        return int(m.group(1)) + int(m.group(2)) / 60.0
    return None


def _ordinals(labels, rank) -> dict[str, int]:
    distinct = sorted(set(labels))
    known = {lab: rank(lab) for lab in distinct}
    top = max((r for r in known.values() if r is not None), default=-1.0)

    def key(lab):
        r = known[lab]
        return (r if r is not None else top + 1.0, _natural_key(lab))

    ordered = sorted(distinct, key=key)
    out: dict[str, int] = {}
    prev = None
    nxt = -1
    for lab in ordered:
        r = known[lab]
        # aliases of one known rank share an id; unknown labels each get their own
        group = ("known", r) if r is not None else ("label", lab)
        if group != prev:
            nxt += 1
            prev = group
        out[lab] = nxt
    return out


@dataclass
class CategoryEncoder:
    """Ordinal codes for Subject / Event / Time, fitted on one record set."""

    subject: dict[str, int] = field(default_factory=dict)
    event: dict[str, int] = field(default_factory=dict)
    time: dict[str, int] = field(default_factory=dict)

    @classmethod
    def fit(cls, records: Sequence[RawRecord]) -> CategoryEncoder:
        subjects = sorted({r.subject for r in records}, key=_natural_key)
        return cls(
            subject={s: i for i, s in enumerate(subjects)},
            event=_ordinals([r.event for r in records], event_rank),
            time=_ordinals([r.time for r in records], time_rank),
        )

    def transform(self, records: Sequence[RawRecord]) -> np.ndarray:
        out = np.zeros((len(records), 3))
        for i, r in enumerate(records):
            for j, (name, table, value) in enumerate(
                (("Subject", self.subject, r.subject), ("Event", self.event, r.event), ("Time", self.time, r.time))
            ):
                if value not in table:
                    raise DataError(f"unseen {name} category {value!r}")
                out[i, j] = table[value]
        return out


def encode_categoricals(records: Sequence[RawRecord], encoder: CategoryEncoder | None = None) -> np.ndarray:
    encoder = encoder or CategoryEncoder.fit(records)
    return encoder.transform(records)


# -- dataset --------------------------------------------------------------------


@dataclass
class Dataset:
    records: list[RawRecord]
    features: np.ndarray
    feature_names: tuple[str, ...]
    ams_scores: np.ndarray
    imputation_log: list[Imputation]
    encoder: CategoryEncoder
    dropped_unlabeled: int = 0

    @property
    def subjects(self) -> np.ndarray:
        return np.array([r.subject for r in self.records])

    def labels(self, scheme: LabelScheme) -> np.ndarray:
        return derive_labels(self.ams_scores, scheme)

    def __len__(self) -> int:
        return len(self.records)


def build_dataset(records: Sequence[RawRecord], encoder: CategoryEncoder | None = None) -> Dataset:
    """Impute, encode and assemble the ``m x 10`` feature matrix.

    Rows without an AMS score cannot be labeled and are dropped first.
    """
    kept = [r for r in records if r.ams_score is not None]
    if not kept:
        raise DataError("no labeled rows")
    numeric, log = impute_missing_mean(kept)
    encoder = encoder or CategoryEncoder.fit(kept)
    cat = encoder.transform(kept)
    X = np.hstack([cat, numeric])
    scores = np.array([r.ams_score for r in kept], dtype=np.int64)
    return Dataset(kept, X, FEATURE_NAMES, scores, log, encoder, len(records) - len(kept))


# -- labels ---------------------------------------------------------------------


class LabelScheme(enum.IntEnum):
    BINARY = 0
    MULTICLASS = 1

    @classmethod
    def parse(cls, name: str | int | LabelScheme) -> LabelScheme:
        if isinstance(name, (LabelScheme, int)):
            return cls(name)
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown label scheme {name!r} (binary|multiclass)") from None

    @property
    def class_names(self) -> tuple[str, ...]:
        if self is LabelScheme.BINARY:
            return ("NoAMS", "AMS")
        return ("NoAMS", "Moderate", "Severe")


def derive_labels(scores, scheme: LabelScheme) -> np.ndarray:
    """Binary: <2 -> 0, >=2 -> 1.  Multiclass: 0-1 -> 0, 2-4 -> 1, >=5 -> 2."""
    s = np.asarray(scores)
    if s.dtype == object or np.any(s < 0):
        raise DataError("AMS score missing or negative")
    if LabelScheme.parse(scheme) is LabelScheme.BINARY:
        return (s >= 2).astype(np.int64)
    return np.digitize(s, [2, 5]).astype(np.int64)


# -- mutual information ---------------------------------------------------------


@dataclass(frozen=True)
class MiScores:
    scores: np.ndarray
    k: int

    def ranking(self) -> np.ndarray:
        """Feature indices, highest score first (stable on ties)."""
        return np.argsort(-self.scores, kind="stable")


def _count_within(sorted_x: np.ndarray, x: np.ndarray, radius: np.ndarray) -> np.ndarray:
    """Number of ``sorted_x`` entries with ``|s - x| < radius`` (strict)."""
    n = sorted_x.size

    def settle(pos, inside):
        # inside(j) is monotone true->false along sorted_x; move pos to the first false
        while True:
            fwd = (pos < n) & inside(np.minimum(pos, n - 1))
            back = (pos > 0) & ~inside(np.maximum(pos - 1, 0))
            if not (fwd.any() or back.any()):
                return pos
            pos = pos + fwd - back

    hi = settle(np.searchsorted(sorted_x, x + radius, side="left"), lambda j: sorted_x[j] - x < radius)
    lo = settle(np.searchsorted(sorted_x, x - radius, side="left"), lambda j: x - sorted_x[j] >= radius)
    return np.maximum(hi - lo, 0)


def _kth_within_class(v: np.ndarray, k: int) -> np.ndarray:
    """Distance from each point of sorted ``v`` to its k-th nearest other point."""
    n = v.size
    padded = np.concatenate([np.full(k, np.inf), v, np.full(k, np.inf)])
    offsets = [o for o in range(-k, k + 1) if o != 0]
    cand = np.stack([np.abs(padded[k + o : k + o + n] - v) for o in offsets], axis=1)
    return np.partition(cand, k - 1, axis=1)[:, k - 1]


def _mi_one(x: np.ndarray, y: np.ndarray, k: int, adapt: bool) -> float:
    m = x.size
    radius = np.empty(m)
    nx = np.empty(m)
    kk = np.empty(m)
    keep = np.ones(m, dtype=bool)
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        kc = k
        if idx.size <= k:
            if not adapt:
                raise DataError(f"class {c} has {idx.size} samples; the estimator needs more than k={k}")
            kc = idx.size - 1
            if kc < 1:
                keep[idx] = False
                continue
        order = idx[np.argsort(x[idx], kind="stable")]
        radius[order] = _kth_within_class(x[order], kc)
        nx[idx] = idx.size
        kk[idx] = kc
    if keep.sum() < 2:
        return 0.0
    xs, r = x[keep], radius[keep]
    mi = _count_within(np.sort(xs), xs, r)
    mi = np.maximum(mi, 1)
    n = xs.size
    est = digamma(n) - np.mean(digamma(nx[keep])) + np.mean(digamma(kk[keep])) - np.mean(digamma(mi))
    return max(0.0, float(est))


def mutual_information(features, labels, k: int = 3, seed: int = 0, adapt_small_classes: bool = False) -> MiScores:
    """Nearest-neighbour MI between each continuous feature column and a
    discrete label (Ross, PLoS ONE 2014), in nats.

    Per sample: ``d`` = distance to the k-th nearest same-class sample (1-D
    absolute difference), ``m_i`` = samples of any class strictly closer than
    ``d`` (the sample itself included, as in Ross), ``N_x`` = its class size.
    Columns with repeated values get seeded jitter of relative size 1e-10 so
    that neighbour ranks are well defined.  Constant columns score 0.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(labels)
    if X.shape[0] != y.shape[0]:
        raise DataError("features and labels differ in length")
    if X.shape[0] <= k + 1:
        raise DataError(f"need more than k+1={k + 1} samples")
    rng = np.random.default_rng(seed)
    out = np.zeros(X.shape[1])
    for j in range(X.shape[1]):
        x = X[:, j].copy()
        noise = rng.uniform(-1.0, 1.0, size=x.size)
        if np.ptp(x) == 0:
            continue
        if np.unique(x).size < x.size:
            scale = max(float(np.std(x)), float(np.mean(np.abs(x))))
            x = x + 1e-10 * scale * noise
        out[j] = _mi_one(x, y, k, adapt_small_classes)
    return MiScores(out, k)


def select_features(scores: MiScores, policy: str | int = "positive") -> np.ndarray:
    """Indices (ascending) of kept features.

    ``"positive"`` keeps every score > 0; an int ``t`` keeps the top ``t``.
    """
    s = scores.scores
    if policy == "positive":
        keep = np.flatnonzero(s > 0)
    else:
        t = int(policy)
        if t < 1:
            raise ValueError("top-k policy needs k >= 1")
        ranked = scores.ranking()
        keep = np.sort(ranked[:t][s[ranked[:t]] > 0])
    if keep.size == 0:
        raise DataError("feature selection kept no features")
    return keep


# -- splitting ------------------------------------------------------------------


class SplitMode(enum.Enum):
    STRATIFIED = "stratified"
    SUBJECT = "subject"


@dataclass(frozen=True)
class SplitSpec:
    mode: SplitMode = SplitMode.STRATIFIED
    fraction: float = 0.8
    seed: int = 42

    def __post_init__(self):
        if not 0.0 < self.fraction < 1.0:
            raise ValueError("split fraction must be in (0, 1)")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split(labels, spec: SplitSpec, subjects=None) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint, covering ``(train_idx, test_idx)``, each sorted ascending."""
    y = np.asarray(labels)
    rng = np.random.default_rng(spec.seed)
    train = []
    if spec.mode is SplitMode.STRATIFIED:
        for c in np.unique(y):
            idx = rng.permutation(np.flatnonzero(y == c))
            n = min(max(_round_half_up(spec.fraction * idx.size), 1), idx.size)
            train.append(idx[:n])
        tr = np.sort(np.concatenate(train))
    else:
        if subjects is None:
            raise ValueError("subject split needs subject ids")
        subjects = np.asarray(subjects)
        uniq = np.array(sorted(set(subjects.tolist()), key=_natural_key))
        if uniq.size < 2:
            raise DataError("subject holdout needs at least two subjects")
        perm = rng.permutation(uniq)
        n = min(max(_round_half_up(spec.fraction * uniq.size), 1), uniq.size - 1)
        tr = np.flatnonzero(np.isin(subjects, perm[:n]))
    te = np.setdiff1d(np.arange(y.size), tr)
    missing = set(np.unique(y).tolist()) - set(np.unique(y[tr]).tolist())
    if missing:
        raise DataError(f"split leaves classes {sorted(missing)} without training samples")
    return tr, te


# -- normalization --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NormStats:
    mean: np.ndarray
    std: np.ndarray
    min: np.ndarray
    max: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NormStats):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self._arrays(), other._arrays()))

    def __hash__(self) -> int:
        return hash(tuple(a.tobytes() for a in self._arrays()))

    def _arrays(self):
        return (self.mean, self.std, self.min, self.max)

    @classmethod
    def fit(cls, X) -> NormStats:
        X = np.asarray(X, dtype=np.float64)
        return cls(X.mean(axis=0), X.std(axis=0), X.min(axis=0), X.max(axis=0))

    def zscore(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        safe = np.where(self.std > 0, self.std, 1.0)
        return np.where(self.std > 0, (X - self.mean) / safe, 0.0)

    def minmax(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        span = self.max - self.min
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, np.clip((X - self.min) / safe, 0.0, 1.0), 0.5)


def normalize(stats: NormStats, X, mode: str = "zscore") -> np.ndarray:
    if mode == "zscore":
        return stats.zscore(X)
    if mode == "minmax":
        return stats.minmax(X)
    raise ValueError(f"unknown normalization mode {mode!r}")
