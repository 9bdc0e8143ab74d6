"""Binary and bipolar hypervectors.

Binary vectors are bit-packed into little-endian ``uint64`` words: logical bit
``d`` lives in word ``d // 64`` at bit position ``d % 64``.  The packing is an
implementation detail; everything public is expressed in logical indices.

Operations
----------
* ``bind``    -- XOR (binary) / element-wise product (bipolar)
* ``bundle``  -- per-dimension majority vote, ties go to 1
* ``permute`` -- circular rotation
* ``hamming`` -- normalized count of differing bits
* ``cosine``  -- computed from the popcount identity ``c = 1 - 2h``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

WORD_BITS = 64


class DimensionMismatch(ValueError):
    pass


def _n_words(dim: int) -> int:
    return (dim + WORD_BITS - 1) // WORD_BITS


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack the last axis of a 0/1 array into uint64 words (zero padded)."""
    bits = np.asarray(bits, dtype=np.uint8)
    dim = bits.shape[-1]
    n_bytes = _n_words(dim) * 8
    packed = np.packbits(bits, axis=-1, bitorder="little")
    pad = n_bytes - packed.shape[-1]
    if pad:
        widths = [(0, 0)] * (packed.ndim - 1) + [(0, pad)]
        packed = np.pad(packed, widths)
    return np.ascontiguousarray(packed).view("<u8")


def unpack_bits(words: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`."""
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, axis=-1, count=dim, bitorder="little")


def popcount(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1)


class BinaryHV:
    """Immutable D-dimensional {0,1} hypervector."""

    __slots__ = ("_words", "_dim")

    def __init__(self, bits: Sequence[int] | np.ndarray):
        bits = np.asarray(bits)
        if bits.ndim != 1 or bits.size == 0:
            raise ValueError("BinaryHV needs a non-empty 1-D bit sequence")
        if not np.isin(bits, (0, 1)).all():
            raise ValueError("BinaryHV entries must be 0 or 1")
        words = pack_bits(bits.astype(np.uint8))
        words.flags.writeable = False
        self._words = words
        self._dim = int(bits.size)

    @classmethod
    def from_words(cls, words: np.ndarray, dim: int) -> BinaryHV:
        words = np.array(words, dtype="<u8")
        if dim < 1 or words.shape != (_n_words(dim),):
            raise ValueError(f"expected {_n_words(dim)} words for dim={dim}")
        tail = dim % WORD_BITS
        if tail:
            words[-1] &= np.uint64((1 << tail) - 1)
        obj = object.__new__(cls)
        words.flags.writeable = False
        obj._words = words
        obj._dim = dim
        return obj

    @classmethod
    def zeros(cls, dim: int) -> BinaryHV:
        return cls.from_words(np.zeros(_n_words(dim), dtype="<u8"), dim)

    @classmethod
    def ones(cls, dim: int) -> BinaryHV:
        return cls.from_words(np.full(_n_words(dim), ~np.uint64(0), dtype="<u8"), dim)

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator) -> BinaryHV:
        return cls(rng.integers(0, 2, size=dim, dtype=np.uint8))

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def words(self) -> np.ndarray:
        return self._words

    @property
    def bits(self) -> np.ndarray:
        return unpack_bits(self._words, self._dim)

    def popcount(self) -> int:
        return int(popcount(self._words))

    def complement(self) -> BinaryHV:
        return BinaryHV.from_words(~self._words, self._dim)

    def to_bytes(self) -> bytes:
        """Packed bits, ``ceil(dim / 8)`` bytes, bit ``d`` at byte ``d // 8``."""
        return self._words.view(np.uint8)[: (self._dim + 7) // 8].tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, dim: int) -> BinaryHV:
        n = (dim + 7) // 8
        if len(data) != n:
            raise ValueError(f"expected {n} bytes for dim={dim}, got {len(data)}")
        buf = np.zeros(_n_words(dim) * 8, dtype=np.uint8)
        buf[:n] = np.frombuffer(data, dtype=np.uint8)
        return cls.from_words(buf.view("<u8"), dim)

    def __len__(self) -> int:
        return self._dim

    def __getitem__(self, d: int) -> int:
        if not -self._dim <= d < self._dim:
            raise IndexError(d)
        d %= self._dim
        return int((int(self._words[d // WORD_BITS]) >> (d % WORD_BITS)) & 1)

    def __xor__(self, other: BinaryHV) -> BinaryHV:
        return bind(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryHV):
            return NotImplemented
        return self._dim == other._dim and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self._dim, self._words.tobytes()))

    def __repr__(self) -> str:
        if self._dim <= 32:
            return f"BinaryHV('{''.join(map(str, self.bits))}')"
        return f"BinaryHV(dim={self._dim}, popcount={self.popcount()})"


class BipolarHV:
    """Immutable D-dimensional {-1,+1} hypervector."""

    __slots__ = ("_values",)

    def __init__(self, values: Sequence[int] | np.ndarray):
        values = np.asarray(values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("BipolarHV needs a non-empty 1-D sequence")
        if not np.isin(values, (-1, 1)).all():
            raise ValueError("BipolarHV entries must be -1 or +1")
        v = values.astype(np.int8)
        v.flags.writeable = False
        self._values = v

    @property
    def dim(self) -> int:
        return int(self._values.size)

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __neg__(self) -> BipolarHV:
        return BipolarHV(-self._values)

    def __mul__(self, other: BipolarHV) -> BipolarHV:
        return bind(self, other)

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BipolarHV):
            return NotImplemented
        return bool(np.array_equal(self._values, other._values))

    def __hash__(self) -> int:
        return hash(self._values.tobytes())

    def __repr__(self) -> str:
        if self.dim <= 16:
            return f"BipolarHV({self._values.tolist()})"
        return f"BipolarHV(dim={self.dim})"


HV = Union[BinaryHV, BipolarHV]


@dataclass
class ScalarAccumulator:
    """Real-valued bundling buffer; single writer."""

    dim: int
    values: np.ndarray = field(default=None)  # type: ignore[assignment]
    count: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.values is None:
            self.values = np.zeros(self.dim, dtype=np.float64)
        else:
            self.values = np.asarray(self.values, dtype=np.float64)
            if self.values.shape != (self.dim,):
                raise DimensionMismatch(f"values shape {self.values.shape} != ({self.dim},)")

    def merge(self, other: ScalarAccumulator) -> ScalarAccumulator:
        """Combine two partial sums (e.g. from separate workers)."""
        _check_dims(self.dim, other.dim)
        return ScalarAccumulator(self.dim, self.values + other.values, self.count + other.count)


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatch(f"dimension mismatch: {a} != {b}")


def bind(a: HV, b: HV) -> HV:
    if type(a) is not type(b):
        raise TypeError(f"cannot bind {type(a).__name__} with {type(b).__name__}")
    _check_dims(a.dim, b.dim)
    if isinstance(a, BinaryHV):
        return BinaryHV.from_words(a.words ^ b.words, a.dim)
    return BipolarHV(a.values * b.values)


def bundle(vs: Sequence[BinaryHV]) -> BinaryHV:
    """Majority vote per dimension; an exact half-half split yields 1."""
    if len(vs) == 0:
        raise ValueError("cannot bundle an empty list")
    dim = vs[0].dim
    for v in vs:
        _check_dims(dim, v.dim)
    if len(vs) == 1:
        return vs[0]
    counts = np.zeros(dim, dtype=np.int64)
    for v in vs:
        counts += v.bits
    return BinaryHV((2 * counts >= len(vs)).astype(np.uint8))


def accumulate(acc: ScalarAccumulator, v: BipolarHV) -> ScalarAccumulator:
    _check_dims(acc.dim, v.dim)
    return ScalarAccumulator(acc.dim, acc.values + v.values, acc.count + 1)


def permute(v: BinaryHV, r: int) -> BinaryHV:
    """Rotate so that bit ``d`` moves to position ``(d + r) mod D``."""
    r %= v.dim
    if r == 0:
        return v
    return BinaryHV(np.roll(v.bits, r))


def hamming(a: BinaryHV, b: BinaryHV) -> float:
    _check_dims(a.dim, b.dim)
    return int(popcount(a.words ^ b.words)) / a.dim


def cosine(a: BipolarHV, b: BipolarHV) -> float:
    _check_dims(a.dim, b.dim)
    differ = int(np.count_nonzero(a.values != b.values))
    return 1.0 - 2.0 * differ / a.dim


def to_bipolar(v: BinaryHV) -> BipolarHV:
    return BipolarHV(2 * v.bits.astype(np.int8) - 1)


def to_binary(v: BipolarHV) -> BinaryHV:
    return BinaryHV((v.values > 0).astype(np.uint8))
