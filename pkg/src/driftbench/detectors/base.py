"""Common detector interface.

Every detector in this package consumes a stream of prediction bits
(1 = the classifier was correct, 0 = it was wrong) one instance at a
time and answers with a :class:`Verdict`.  Detectors that internally
monitor errors rather than successes take the complement themselves,
so callers never have to remember which convention a method uses.

A detector instance is single-stream mutable state: it may be handed
from thread to thread, and many instances can run in parallel on
independent streams, but stepping one instance concurrently is not
supported.
"""

from __future__ import annotations

import enum
from abc import ABC, abstractmethod
from typing import Iterable, Optional


class Verdict(enum.Enum):
    """Outcome of feeding one prediction bit to a detector."""

    NO_CHANGE = "no_change"
    WARNING = "warning"
    DRIFT = "drift"


class DriftDetector(ABC):
    """Base class for prediction-bit drift detectors."""

    name: str = "detector"

    @abstractmethod
    def step(self, bit) -> Verdict:
        """Consume one prediction bit (truthy = correct prediction)."""

    @abstractmethod
    def reset(self) -> None:
        """Return to the freshly constructed state."""

    def scan(self, bits: Iterable) -> Optional[int]:
        """Feed ``bits`` until the first Drift verdict.

        Returns the index (within ``bits``) of the bit that triggered
        the drift, or None if the whole sequence was consumed without
        one.  State advances exactly as far as the bits consumed, so a
        caller can resume with the remaining bits.
        """
        step = self.step
        drift = Verdict.DRIFT
        bit_list = bits.tolist() if hasattr(bits, "tolist") else bits
        for i, b in enumerate(bit_list):
            if step(b) is drift:
                return i
        return None

    def drift_points(self, bits) -> list[int]:
        """Indices of every Drift verdict over a full bit sequence."""
        out = []
        offset = 0
        remaining = bits
        while True:
            hit = self.scan(remaining)
            if hit is None:
                return out
            out.append(offset + hit)
            offset += hit + 1
            remaining = remaining[hit + 1:]
