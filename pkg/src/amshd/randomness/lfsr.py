"""Fibonacci linear-feedback shift registers.

State bit ``j`` holds output bit ``n + j``; a tap ``t`` reads state bit
``width - t``, so the output sequence obeys

    b[n + width] = XOR over taps t of b[n + width - t]

with characteristic polynomial ``x**width + sum(x**(width - t))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# one maximal-length tap set per width (Xilinx XAPP052 / standard tables)
MAXIMAL_TAPS: dict[int, tuple[int, ...]] = {
    2: (2, 1),
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 6, 4, 1),
    13: (13, 4, 3, 1),
    14: (14, 5, 3, 1),
    15: (15, 14),
    16: (16, 15, 13, 4),
    17: (17, 14),
    18: (18, 11),
    19: (19, 6, 2, 1),
    20: (20, 17),
    21: (21, 19),
    22: (22, 21),
    23: (23, 18),
    24: (24, 23, 22, 17),
    25: (25, 22),
    26: (26, 6, 2, 1),
    27: (27, 5, 2, 1),
    28: (28, 25),
    29: (29, 27),
    30: (30, 6, 4, 1),
    31: (31, 28),
    32: (32, 22, 2, 1),
}


def characteristic_polynomial(width: int, taps: tuple[int, ...]) -> int:
    """GF(2) polynomial as an int (bit i = coefficient of x**i)."""
    poly = 1 << width
    for t in taps:
        poly ^= 1 << (width - t)
    return poly


@dataclass(frozen=True)
class LfsrState:
    width: int
    state: int
    taps: tuple[int, ...]

    def __post_init__(self):
        if not 2 <= self.width <= 64:
            raise ValueError(f"unsupported LFSR width {self.width}")
        if self.state == 0:
            raise ValueError("LFSR state must be nonzero (all-zero is a fixed point)")
        if not 0 < self.state < (1 << self.width):
            raise ValueError(f"state {self.state:#x} does not fit in {self.width} bits")
        if self.width not in self.taps or any(not 1 <= t <= self.width for t in self.taps):
            raise ValueError(f"bad tap set {self.taps} for width {self.width}")

    @classmethod
    def maximal(cls, width: int, state: int) -> LfsrState:
        return cls(width, state, MAXIMAL_TAPS[width])


def lfsr_next(s: LfsrState) -> tuple[int, LfsrState]:
    """Emit one bit and return the successor state."""
    out = s.state & 1
    fb = 0
    for t in s.taps:
        fb ^= (s.state >> (s.width - t)) & 1
    nxt = (s.state >> 1) | (fb << (s.width - 1))
    return out, LfsrState(s.width, nxt, s.taps)


def lfsr_bits(s: LfsrState, n: int) -> tuple[np.ndarray, LfsrState]:
    """Emit ``n`` bits at once.

    The recurrence only looks back ``min(taps)`` positions at the closest, so
    the output is filled in blocks of that length.
    """
    w = s.width
    seq = np.zeros(w + n, dtype=np.uint8)
    seq[:w] = [(s.state >> j) & 1 for j in range(w)]
    block = min(s.taps)
    i = w
    while i < w + n:
        j = min(i + block, w + n)
        acc = np.zeros(j - i, dtype=np.uint8)
        for t in s.taps:
            acc ^= seq[i - t : j - t]
        seq[i:j] = acc
        i = j
    tail = seq[n : n + w]
    state = int(np.dot(tail.astype(np.int64), 1 << np.arange(w, dtype=np.int64))) if w < 63 else sum(
        int(b) << k for k, b in enumerate(tail)
    )
    return seq[:n], LfsrState(w, state, s.taps)


def lfsr_period(s: LfsrState) -> int:
    """Brute-force cycle length starting from ``s``."""
    start = s.state
    cur = s
    n = 0
    while True:
        _, cur = lfsr_next(cur)
        n += 1
        if cur.state == start:
            return n
