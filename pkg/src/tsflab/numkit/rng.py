"""Counter-based random streams (Philox keyed by seed and stream id)."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

DEFAULT_SEED = 2026
_MASK64 = (1 << 64) - 1


def stream_id_for(*labels) -> int:
    """Stable 64-bit id derived from arbitrary labels."""
    text = "\x1f".join(repr(lbl) for lbl in labels).encode()
    return int.from_bytes(hashlib.sha256(text).digest()[:8], "little")


@dataclass(frozen=True)
class RngStream:
    seed: int = DEFAULT_SEED
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, *labels) -> "RngStream":
        return RngStream(self.seed, stream_id_for(self.stream_id, *labels))
