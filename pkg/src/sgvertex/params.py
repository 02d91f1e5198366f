"""Model parameters for the alternating-inhomogeneity six-vertex chain."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ModelParams:
    """Couplings and geometry of a single run.

    eta   : anisotropy, strictly inside (0, pi); Delta = cos(eta) is derived
    theta : inhomogeneity shift carried by every second site, >= 0
    L     : number of chain sites, even, >= 4
    M     : number of up spins (= number of Bethe roots) in the working sector
    """

    eta: float
    theta: float
    L: int
    M: int

    def __post_init__(self):
        if not 0.0 < self.eta < math.pi:
            raise ValueError(f"eta must lie strictly in (0, pi), got {self.eta}")
        if self.theta < 0.0:
            raise ValueError(f"theta must be >= 0, got {self.theta}")
        if self.L < 4 or self.L % 2:
            raise ValueError(f"L must be an even integer >= 4, got {self.L}")
        if not 0 <= self.M <= self.L:
            raise ValueError(f"M must lie in [0, L], got M={self.M} at L={self.L}")

    @property
    def delta(self) -> float:
        """XXZ anisotropy Delta = cos(eta)."""
        return math.cos(self.eta)

    @property
    def coupling_h(self) -> float:
        """Relevant coupling h = exp(-theta)."""
        return math.exp(-self.theta)

    def inhomogeneities(self) -> list[float]:
        """Per-site spectral shift: 0 on sites 0,2,4,..., theta on sites 1,3,5,..."""
        return [0.0 if i % 2 == 0 else self.theta for i in range(self.L)]

    def with_sector(self, M: int) -> "ModelParams":
        return replace(self, M=M)

    def as_dict(self) -> dict:
        return {"eta": self.eta, "theta": self.theta, "L": self.L, "M": self.M}
