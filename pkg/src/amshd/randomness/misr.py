"""Multiple-input shift register used as a position-HV generator.

Stage ``FF_0 .. FF_{D-1}`` form a chain; the last stage feeds back into every
earlier link through a mask::

    next[0] = state[D-1]
    next[i] = state[i-1] ^ (mask[i-1] & state[D-1])      for i >= 1

The register content before each step is the emitted hypervector.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from ..hv import BinaryHV


@dataclass
class MisrGenerator:
    state: np.ndarray
    mask: np.ndarray
    seed_provenance: str = "explicit"
    dim: int = field(init=False)

    def __post_init__(self):
        self.state = np.array(self.state, dtype=np.uint8)
        self.mask = np.array(self.mask, dtype=np.uint8)
        if self.state.ndim != 1 or self.state.shape != self.mask.shape:
            raise ValueError("state and mask must be 1-D and the same length")
        if not (np.isin(self.state, (0, 1)).all() and np.isin(self.mask, (0, 1)).all()):
            raise ValueError("state and mask must be bit vectors")
        if not self.state.any():
            raise ValueError("MISR seed must be nonzero (zero is an absorbing state)")
        self.dim = int(self.state.size)

    def step(self) -> BinaryHV:
        """Emit the current register as a hypervector and advance in place."""
        out = BinaryHV(self.state)
        fb = self.state[-1]
        nxt = np.empty_like(self.state)
        nxt[0] = fb
        nxt[1:] = self.state[:-1] ^ (self.mask[:-1] & fb)
        self.state = nxt
        return out

    def take(self, n: int) -> list[BinaryHV]:
        return [self.step() for _ in range(n)]


def misr_step(g: MisrGenerator) -> tuple[BinaryHV, MisrGenerator]:
    """Functional form of :meth:`MisrGenerator.step`; ``g`` is left untouched."""
    succ = copy.deepcopy(g)
    hv = succ.step()
    return hv, succ
