"""conformance/prng.py

Générateur splitmix64 entièrement spécifié : n'importe quelle implémentation
régénère bit pour bit les mêmes entrées à partir de (graine globale, index).
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from tensorbridge.core.types import DType, Shape

MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def case_seed(seed: int, index: int) -> int:
    return (seed ^ index) & MASK64


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Flottant uniforme dans [0, 1) : les 53 bits de poids fort."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float = -2.0, hi: float = 2.0, min_abs: Optional[float] = None) -> float:
        """
        Uniforme dans [lo, hi). Avec min_abs, une valeur |x| < min_abs est
        décalée de copysign(min_abs, x), ce qui l'écarte des points non lisses.
        """
        x = lo + (hi - lo) * self.next_float()
        if min_abs is not None and abs(x) < min_abs:
            x += math.copysign(min_abs, x)
        return x

    def randint(self, n: int) -> int:
        """Entier dans [0, n)."""
        return self.next_u64() % n

    def coin(self) -> bool:
        return bool(self.next_u64() & 1)

    def array(self, shape: Shape, dtype: DType = DType.F64, lo: float = -2.0, hi: float = 2.0, min_abs: Optional[float] = None) -> np.ndarray:
        size = math.prod(shape)
        values = [self.uniform(lo, hi, min_abs) for _ in range(size)]
        return np.array(values, dtype=np.float64).astype(DType.parse(dtype).numpy).reshape(shape)
