"""Unscrambled Sobol sequences from a pinned direction-number table.

The shipped table is Joe & Kuo's ``new-joe-kuo-6.21201`` in its original
text layout (one line per dimension: ``d s a m_1 .. m_s``; dimension 1 is
implicit).  Points are generated in Gray-code order, which is what MATLAB's
``sobolset`` and SciPy's ``qmc.Sobol`` produce without scrambling.

Point 0 (the origin) is never emitted: indices start at 1 so that every
value is strictly inside (0, 1).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

BITS = 32
MAX_INDEX = (1 << BITS) - 1
TABLE_NAME = "new-joe-kuo-6.21201.txt"


@functools.lru_cache(maxsize=None)
def _raw_table(path: str | None = None) -> tuple[tuple[int, int, tuple[int, ...]], ...]:
    if path is None:
        text = resources.files("amshd.randomness").joinpath("data").joinpath(TABLE_NAME).read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("d "):
            continue
        d, s, a, *m = (int(tok) for tok in line.split())
        if d != len(rows) + 2 or len(m) != s:
            raise ValueError(f"malformed direction-number line for dimension {d}")
        rows.append((s, a, tuple(m)))
    return tuple(rows)


def max_dimension(path: str | None = None) -> int:
    return len(_raw_table(path)) + 1


@functools.lru_cache(maxsize=None)
def _full_table(path: str | None = None) -> np.ndarray:
    table = _raw_table(path)
    n = len(table) + 1
    deg = np.array([1] + [s for s, _, _ in table], dtype=np.int64)
    coef = np.array([0] + [a for _, a, _ in table], dtype=np.int64)
    m = np.zeros((n, BITS), dtype=np.uint64)
    m[0, :] = 1
    for d, (s, _, init) in enumerate(table, start=1):
        m[d, :s] = init
    rows = np.arange(n)
    for j in range(1, BITS):
        live = rows[(j >= deg) & (rows > 0)]
        if live.size == 0:
            continue
        s = deg[live]
        base = m[live, j - s]
        new = base ^ (base << s.astype(np.uint64))
        for k in range(1, int(s.max())):
            use = (k < s) & (((coef[live] >> np.maximum(s - 1 - k, 0)) & 1) == 1)
            new ^= np.where(use, m[live, j - k] << np.uint64(k), np.uint64(0))
        m[live, j] = new
    shifts = np.arange(BITS - 1, -1, -1, dtype=np.uint64)
    out = m << shifts
    out.flags.writeable = False
    return out


def direction_numbers(n_dims: int, path: str | None = None) -> np.ndarray:
    """``(n_dims, BITS)`` uint64 array of direction integers ``v_j * 2**BITS``."""
    full = _full_table(path)
    if not 1 <= n_dims <= full.shape[0]:
        raise ValueError(f"direction numbers available for dimensions 1..{full.shape[0]}")
    return full[:n_dims]


def _gray_xor(v: np.ndarray, index: np.ndarray) -> np.ndarray:
    # x_i = XOR of v_j over the set bits of gray(i)
    gray = index ^ (index >> np.uint64(1))
    out = np.zeros(np.broadcast_shapes(gray.shape, v.shape[:-1]), dtype=np.uint64)
    for j in range(BITS):
        bit = (gray >> np.uint64(j)) & np.uint64(1)
        out ^= bit * v[..., j]
    return out


def _check_index(index: np.ndarray) -> np.ndarray:
    index = np.asarray(index, dtype=np.int64)
    if np.any(index < 1):
        raise ValueError("Sobol indices start at 1 (point 0 is the origin and is skipped)")
    if np.any(index > MAX_INDEX):
        raise ValueError(f"Sobol index beyond 2**{BITS} - 1")
    return index.astype(np.uint64)


def sobol_point(dim: int, index: int) -> float:
    """The ``index``-th value (``index >= 1``) of Sobol coordinate ``dim`` (1-based)."""
    return float(sobol_points(dim, np.array([index]))[0])


def sobol_points(dim: int, indices: np.ndarray) -> np.ndarray:
    """Vectorized :func:`sobol_point` over many indices of one coordinate."""
    if dim < 1:
        raise ValueError("Sobol dimensions are 1-based")
    idx = _check_index(indices)
    v = direction_numbers(dim)[dim - 1]
    return _gray_xor(v, idx).astype(np.float64) / float(1 << BITS)


def sobol_vector(n_dims: int, index: int, first_dim: int = 1) -> np.ndarray:
    """One Sobol point across coordinates ``first_dim .. first_dim + n_dims - 1``."""
    idx = _check_index(np.array(index))
    v = direction_numbers(first_dim + n_dims - 1)[first_dim - 1 :]
    return _gray_xor(v, idx).astype(np.float64) / float(1 << BITS)


@dataclass
class SobolSource:
    """Cursor over one Sobol coordinate."""

    dimension_index: int
    cursor: int = 1
    direction: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.dimension_index < 1:
            raise ValueError("Sobol dimensions are 1-based")
        self.direction = direction_numbers(self.dimension_index)[self.dimension_index - 1]
        _check_index(np.array(self.cursor))

    def point(self, index: int) -> float:
        return sobol_point(self.dimension_index, index)

    def take(self, n: int) -> np.ndarray:
        idx = np.arange(self.cursor, self.cursor + n)
        out = sobol_points(self.dimension_index, idx)
        self.cursor += n
        return out

    def __iter__(self):
        return self

    def __next__(self) -> float:
        return float(self.take(1)[0])
