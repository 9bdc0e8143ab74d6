"""Sample encoders and class-hypervector construction.

Two encoder variants share one configuration type:

``PROJECTION`` (bipolar path)
    z-scored features times a D x m bipolar matrix, summed over features.
``SYMBOLIC`` (binary path)
    min-max scaled features as thermometer codes, each XOR-bound to its own
    position HV, then majority-bundled.

Either way class accumulators are z-scored across their D entries and
binarized with ``sign(z - alpha * (2u - 1))``, ``u`` being the source's dither
stream; zero maps to +1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .data import NormStats
from .hv import BinaryHV, BipolarHV, ScalarAccumulator, bind, bundle
from .randomness import SourceKind, generate_position_hvs, uniform_stream
from .randomness.sources import DITHER_LANE


class Variant(enum.IntEnum):
    PROJECTION = 0
    SYMBOLIC = 1

    @classmethod
    def parse(cls, name: str | int | Variant) -> Variant:
        if isinstance(name, (Variant, int)):
            return cls(name)
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown encoder variant {name!r} (projection|symbolic)") from None


@dataclass(frozen=True)
class EncoderConfig:
    dim: int = 1000
    source: SourceKind = SourceKind.SOBOL
    variant: Variant = Variant.PROJECTION
    seed: int = 0
    alpha: float = 0.5
    selected_features: tuple[int, ...] | None = None
    norm_stats: NormStats | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        object.__setattr__(self, "source", SourceKind.parse(self.source))
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if self.selected_features is not None:
            object.__setattr__(self, "selected_features", tuple(int(i) for i in self.selected_features))

    def with_fit(self, selected: Sequence[int], stats: NormStats) -> EncoderConfig:
        return replace(self, selected_features=tuple(int(i) for i in selected), norm_stats=stats)

    @property
    def n_features(self) -> int:
        if self.selected_features is None:
            raise ValueError("encoder config has no feature selection yet")
        return len(self.selected_features)


@dataclass(frozen=True)
class EncodedSample:
    """Scalar D-vector (projection) or binary HV (symbolic)."""

    dim: int
    values: np.ndarray | None = None
    hv: BinaryHV | None = None

    def bipolar_values(self) -> np.ndarray:
        if self.hv is not None:
            return 2.0 * self.hv.bits - 1.0
        return np.asarray(self.values, dtype=np.float64)


# -- primitive encoders --------------------------------------------------------


def thermometer_bits(f, dim: int) -> np.ndarray:
    """Unary code: bit ``d`` is 1 iff ``f > d / dim``; broadcasts over ``f``."""
    f = np.clip(np.asarray(f, dtype=np.float64), 0.0, 1.0)
    levels = np.arange(dim) / dim
    return (f[..., None] > levels).astype(np.uint8)


def thermometer_encode(f: float, dim: int) -> BinaryHV:
    return BinaryHV(thermometer_bits(f, dim))


def projection_matrix(config: EncoderConfig, n_features: int | None = None) -> np.ndarray:
    """``D x m`` int8 matrix of +-1; column ``j`` thresholds source lane ``j`` at 0.5."""
    m = config.n_features if n_features is None else n_features
    if m < 1:
        raise ValueError("projection needs at least one feature")
    cols = [uniform_stream(config.source, config.dim, config.seed, lane=j) >= 0.5 for j in range(m)]
    return np.where(np.stack(cols, axis=1), 1, -1).astype(np.int8)


def encode_projection(row, B: np.ndarray) -> EncodedSample:
    row = np.asarray(row, dtype=np.float64)
    if row.shape != (B.shape[1],):
        raise ValueError(f"row has {row.size} features, projection expects {B.shape[1]}")
    return EncodedSample(B.shape[0], values=B.astype(np.float64) @ row)


def encode_symbolic(row, positions: Sequence[BinaryHV]) -> EncodedSample:
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1 or row.size != len(positions):
        raise ValueError(f"row has {row.size} features but {len(positions)} position HVs were given")
    dim = positions[0].dim
    bound = [bind(thermometer_encode(f, dim), p) for f, p in zip(row, positions)]
    return EncodedSample(dim, hv=bundle(bound))


def accumulate_class(samples: Sequence[EncodedSample]) -> ScalarAccumulator:
    if not samples:
        raise ValueError("class has no training samples")
    dim = samples[0].dim
    if any(s.dim != dim for s in samples):
        raise ValueError("samples differ in dimension")
    total = np.sum([s.bipolar_values() for s in samples], axis=0)
    return ScalarAccumulator(dim, total, len(samples))


def dither_stream(config: EncoderConfig) -> np.ndarray:
    return uniform_stream(config.source, config.dim, config.seed, lane=DITHER_LANE)


def binarize_values(values: np.ndarray, dither: np.ndarray, alpha: float) -> np.ndarray:
    """Row-wise z-score across the last axis, dithered sign, ties to +1 (int8).

    A constant row has z = 0 everywhere and carries no signal, so it maps to
    all +1 without dither.
    """
    v = np.asarray(values, dtype=np.float64)
    mu = v.mean(axis=-1, keepdims=True)
    sd = v.std(axis=-1, keepdims=True)
    flat = sd == 0
    z = np.where(flat, 0.0, (v - mu) / np.where(flat, 1.0, sd))
    s = np.where(z - alpha * (2.0 * dither - 1.0) >= 0, 1, -1)
    return np.where(flat, 1, s).astype(np.int8)


def binarize_class(K: ScalarAccumulator, config: EncoderConfig) -> BinaryHV | BipolarHV:
    s = binarize_values(K.values, dither_stream(config), config.alpha)
    if config.variant is Variant.SYMBOLIC:
        return BinaryHV((s > 0).astype(np.uint8))
    return BipolarHV(s)


# -- batch encoder -------------------------------------------------------------


class Encoder:
    """All generated material for one fitted config, plus batch encoding.

    Training and inference both go through :meth:`encode` /
    :meth:`query_bits`, so a row always encodes identically.
    """

    def __init__(self, config: EncoderConfig):
        if config.selected_features is None or config.norm_stats is None:
            raise ValueError("encoder config must carry feature selection and normalization stats")
        self.config = config
        self.dither = dither_stream(config)
        m = config.n_features
        if config.variant is Variant.PROJECTION:
            self.B = projection_matrix(config)
            self.positions = None
        else:
            self.B = None
            self.positions = generate_position_hvs(config.source, config.dim, m, config.seed)
            self._pos_bits = np.stack([p.bits for p in self.positions])

    def select(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        cols = self.config.selected_features
        if X.shape[1] <= max(cols):
            raise ValueError(f"rows have {X.shape[1]} features; model needs index {max(cols)}")
        return X[:, cols]

    def normalized(self, X) -> np.ndarray:
        Xs = self.select(X)
        stats = self.config.norm_stats
        if self.config.variant is Variant.PROJECTION:
            return stats.zscore(Xs)
        return stats.minmax(Xs)

    def encode(self, X, chunk: int = 256) -> np.ndarray:
        """``n x D`` float array of per-sample (bipolar-lifted) representations."""
        Xn = self.normalized(X)
        if self.config.variant is Variant.PROJECTION:
            return Xn @ self.B.T.astype(np.float64)
        return 2.0 * self._symbolic_bits(Xn, chunk) - 1.0

    def _symbolic_bits(self, Xn: np.ndarray, chunk: int) -> np.ndarray:
        D = self.config.dim
        m = Xn.shape[1]
        out = np.empty((Xn.shape[0], D), dtype=np.uint8)
        for a in range(0, Xn.shape[0], chunk):
            therm = thermometer_bits(Xn[a : a + chunk], D)
            ones = (therm ^ self._pos_bits[None, :, :]).sum(axis=1, dtype=np.int64)
            out[a : a + chunk] = 2 * ones >= m
        return out

    def query_bits(self, X) -> np.ndarray:
        """``n x D`` 0/1 query hypervectors (binary image of the bipolar query)."""
        Xn = self.normalized(X)
        if self.config.variant is Variant.SYMBOLIC:
            return self._symbolic_bits(Xn, 256)
        scal = Xn @ self.B.T.astype(np.float64)
        return (binarize_values(scal, self.dither, self.config.alpha) > 0).astype(np.uint8)

    def binarize(self, K: np.ndarray) -> np.ndarray:
        """Class accumulators (``c x D``) to 0/1 class bits."""
        return (binarize_values(K, self.dither, self.config.alpha) > 0).astype(np.uint8)
