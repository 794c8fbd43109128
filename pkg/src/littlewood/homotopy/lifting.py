"""Random liftings of supports."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..polysys import Exponent


@dataclass(frozen=True)
class LiftedSupport:
    support: tuple[Exponent, ...]
    lifting: Mapping[Exponent, float]

    def __post_init__(self):
        if set(self.lifting) != set(self.support):
            raise ValueError("lifting must be defined on exactly the support")

    def lifted_value(self, a: Exponent, alpha: Sequence[float]) -> float:
        """Inner product of the lifted point (a, w(a)) with (alpha, 1)."""
        return float(np.dot(a, alpha)) + self.lifting[a]


def random_lifting(supports: Sequence[Sequence[Exponent]], seed: int) -> list[LiftedSupport]:
    """Uniform [0, 1) lifting values, reproducible from ``seed``."""
    if not supports:
        raise ValueError("need at least one support")
    rng = np.random.default_rng(seed)
    out = []
    for support in supports:
        support = tuple(tuple(int(v) for v in a) for a in support)
        values = rng.random(len(support))
        out.append(LiftedSupport(support, dict(zip(support, (float(v) for v in values)))))
    return out
