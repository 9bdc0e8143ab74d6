"""Randomness sources behind every generated matrix and hypervector.

Each source kind produces *uniform streams*: deterministic arrays of values in
(0, 1) addressed by ``(seed, lane)``.  Lanes keep independent consumers apart
(one lane per projection column, one for binarization dither, two for the
MISR seed and mask).

* ``PSEUDO``   -- 31-bit maximal LFSR, 24 output bits per value, state
  derived from ``(seed, lane)`` with :class:`numpy.random.SeedSequence`.
* ``SOBOL``    -- Sobol coordinate ``lane + 1`` over the aligned index block
  ``[(seed + 1) N, (seed + 2) N)`` with ``N = next_pow2(n)``.  Aligned blocks
  of a base-2 Sobol coordinate are stratified, and the block never contains
  the skipped index 0.
* ``HADAMARD`` -- value bits are read off ``log2(N)`` linearly independent
  Sylvester rows, the leading one being row ``(lane + seed) mod (N-1) + 1``.
  Thresholding at 0.5 therefore returns that Hadamard row exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..hv import BinaryHV, popcount
from .hadamard import hadamard_rows, next_pow2
from .lfsr import LfsrState, lfsr_bits
from .misr import MisrGenerator
from .sobol import MAX_INDEX, max_dimension, sobol_points, sobol_vector


class SourceKind(enum.IntEnum):
    PSEUDO = 0
    SOBOL = 1
    HADAMARD = 2

    @classmethod
    def parse(cls, name: str | int | SourceKind) -> SourceKind:
        if isinstance(name, (SourceKind, int)):
            return cls(name)
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown source kind {name!r} (pseudo|sobol|hadamard)") from None


DITHER_LANE = 512
MISR_SEED_LANE = 1024
MISR_MASK_LANE = 1025

STREAM_LFSR_WIDTH = 31
VALUE_BITS = 24

# Sobol point indices feeding the MISR seed/mask; any index with a long Gray
# code works, these are just fixed far apart.
SOBOL_SEED_BASE = 1 << 12
SOBOL_MASK_BASE = 1 << 13


def _lfsr_for(seed: int, lane: int) -> LfsrState:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(lane),))
    state = int(ss.generate_state(1, np.uint32)[0]) & ((1 << STREAM_LFSR_WIDTH) - 1)
    return LfsrState.maximal(STREAM_LFSR_WIDTH, state or 1)


def _pseudo_uniform(n: int, seed: int, lane: int) -> np.ndarray:
    bits, _ = lfsr_bits(_lfsr_for(seed, lane), n * VALUE_BITS)
    weights = 1 << np.arange(VALUE_BITS - 1, -1, -1, dtype=np.int64)
    ints = bits.reshape(n, VALUE_BITS).astype(np.int64) @ weights
    return (ints + 0.5) / float(1 << VALUE_BITS)


def _sobol_uniform(n: int, seed: int, lane: int) -> np.ndarray:
    start = (seed + 1) * next_pow2(n)
    if start + n - 1 > MAX_INDEX:
        raise ValueError("seed too large for the Sobol index range")
    return sobol_points(lane + 1, np.arange(start, start + n))


def _hadamard_uniform(n: int, seed: int, lane: int) -> np.ndarray:
    order = next_pow2(max(n, 2))
    k = order.bit_length() - 1
    lead = (lane + seed) % (order - 1) + 1
    high = lead.bit_length() - 1
    rows = [lead] + [1 << j for j in range(k - 1, -1, -1) if j != high]
    bits = (hadamard_rows(order, np.array(rows), n) > 0).astype(np.int64)
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    return (weights @ bits + 0.5) / float(order)


def uniform_stream(kind: SourceKind, n: int, seed: int, lane: int) -> np.ndarray:
    """``n`` deterministic values strictly inside (0, 1)."""
    if n < 1:
        raise ValueError("stream length must be positive")
    if seed < 0 or lane < 0:
        raise ValueError("seed and lane must be non-negative")
    kind = SourceKind.parse(kind)
    if kind is SourceKind.PSEUDO:
        return _pseudo_uniform(n, seed, lane)
    if kind is SourceKind.SOBOL:
        return _sobol_uniform(n, seed, lane)
    return _hadamard_uniform(n, seed, lane)


def misr_for(kind: SourceKind, dim: int, seed: int) -> MisrGenerator:
    """MISR with seed and feedback mask drawn from ``kind``.

    For ``SOBOL`` the seed register is one ``dim``-dimensional Sobol point
    thresholded coordinate-wise at 0.5 and the mask another such point.
    """
    kind = SourceKind.parse(kind)
    if kind is SourceKind.PSEUDO:
        state = _pseudo_uniform(dim, seed, MISR_SEED_LANE) >= 0.5
        mask = _pseudo_uniform(dim, seed, MISR_MASK_LANE) >= 0.5
        prov = f"lfsr{STREAM_LFSR_WIDTH} seed={seed} lanes=({MISR_SEED_LANE},{MISR_MASK_LANE})"
    elif kind is SourceKind.SOBOL:
        if dim > max_dimension():
            raise ValueError(f"Sobol-seeded MISR supports D <= {max_dimension()}")
        i_seed = SOBOL_SEED_BASE + 2 * seed + 1
        i_mask = SOBOL_MASK_BASE + 2 * seed + 1
        state = sobol_vector(dim, i_seed) >= 0.5
        mask = sobol_vector(dim, i_mask) >= 0.5
        prov = f"sobol dims 1..{dim} points ({i_seed},{i_mask}) >= 0.5"
    else:
        raise ValueError("Hadamard position HVs come from matrix rows, not a MISR")
    if not state.any():
        state[0] = True
    return MisrGenerator(state.astype(np.uint8), mask.astype(np.uint8), prov)


def generate_position_hvs(kind: SourceKind, dim: int, count: int, seed: int = 0) -> list[BinaryHV]:
    """``count`` distinct position hypervectors of dimension ``dim``."""
    if dim < 1 or count < 1:
        raise ValueError("dim and count must be positive")
    kind = SourceKind.parse(kind)
    if kind is SourceKind.HADAMARD:
        order = next_pow2(dim)
        if count > order - 1:
            raise ValueError(f"only {order - 1} non-constant Hadamard rows at D={dim}")
        rows = hadamard_rows(order, np.arange(1, count + 1), dim)
        return [BinaryHV((r > 0).astype(np.uint8)) for r in rows]
    if dim < 64 and count >= (1 << dim) - 1:
        raise ValueError(f"cannot draw {count} distinct states from a {dim}-bit register")
    hvs = misr_for(kind, dim, seed).take(count)
    if len(set(hvs)) != count:
        raise ValueError(f"MISR cycled before emitting {count} distinct states")
    return hvs


def pairwise_hamming(hvs: list[BinaryHV]) -> np.ndarray:
    """Normalized Hamming distance of every unordered pair, row-major order."""
    if len(hvs) < 2:
        raise ValueError("need at least two hypervectors")
    dim = hvs[0].dim
    if any(v.dim != dim for v in hvs):
        raise ValueError("hypervectors differ in dimension")
    words = np.stack([v.words for v in hvs])
    out = [popcount(words[i] ^ words[i + 1 :]) for i in range(len(hvs) - 1)]
    return np.concatenate(out) / dim


@dataclass(frozen=True)
class OrthoHistogram:
    edges: np.ndarray
    fraction: np.ndarray
    mean: float
    std: float
    n_pairs: int


def orthogonality_histogram(hvs: list[BinaryHV], bins: int = 50) -> OrthoHistogram:
    """Histogram over [0, 1] of pairwise Hamming distances (fractions sum to 1)."""
    d = pairwise_hamming(hvs)
    counts, edges = np.histogram(d, bins=bins, range=(0.0, 1.0))
    return OrthoHistogram(edges, counts / d.size, float(d.mean()), float(d.std()), int(d.size))
