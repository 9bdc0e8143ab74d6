"""Sylvester-type Hadamard matrices.

Entry ``(r, c)`` of the Sylvester matrix of order ``2**k`` is
``(-1) ** popcount(r & c)``, so single rows can be produced without building
the whole matrix.
"""

from __future__ import annotations

import numpy as np

from ..hv import BipolarHV


def _check_order(n: int) -> None:
    if n < 1 or n & (n - 1):
        raise ValueError(f"Hadamard order must be a power of two, got {n}")


def next_pow2(n: int) -> int:
    return 1 << max(0, (int(n) - 1).bit_length())


def sylvester(n: int) -> np.ndarray:
    """Full ``n x n`` matrix by the doubling recursion ``[[H, H], [H, -H]]``."""
    _check_order(n)
    h = np.ones((1, 1), dtype=np.int64)
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h


def hadamard_rows(n: int, rows: np.ndarray, n_cols: int | None = None) -> np.ndarray:
    """Rows of ``h_n`` as an int8 array, optionally truncated to ``n_cols``."""
    _check_order(n)
    rows = np.asarray(rows, dtype=np.int64)
    if np.any(rows < 0) or np.any(rows >= n):
        raise ValueError(f"Hadamard row out of range for order {n}")
    cols = np.arange(n if n_cols is None else n_cols, dtype=np.int64)
    parity = np.bitwise_count(rows[..., None] & cols) & 1
    return (1 - 2 * parity).astype(np.int8)


def hadamard_row(n: int, row: int) -> BipolarHV:
    return BipolarHV(hadamard_rows(n, np.array(row)))
