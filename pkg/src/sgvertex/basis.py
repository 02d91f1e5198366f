"""Fixed-magnetization sector bases and dense operators on them.

States are stored as bitmasks over the L chain sites, bit i set meaning
an up spin (occupied hard-core boson) on site i.  Basis order is
ascending bitmask, so indices are reproducible across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np


@dataclass(frozen=True)
class SectorBasis:
    """All L-site configurations with exactly M bits set, in ascending order."""

    L: int
    M: int
    states: tuple = field(repr=False)
    index: dict = field(repr=False)

    @classmethod
    def build(cls, L: int, M: int) -> "SectorBasis":
        if not 0 <= M <= L:
            raise ValueError(f"invalid sector M={M} for L={L}")
        states = sorted(
            sum(1 << p for p in positions)
            for positions in combinations(range(L), M)
        )
        index = {s: k for k, s in enumerate(states)}
        return cls(L=L, M=M, states=tuple(states), index=index)

    @property
    def dim(self) -> int:
        return len(self.states)

    def occupations(self) -> np.ndarray:
        """(dim, L) array of site occupations n_i per basis state."""
        occ = np.zeros((self.dim, self.L), dtype=np.int8)
        for k, s in enumerate(self.states):
            for i in range(self.L):
                occ[k, i] = (s >> i) & 1
        return occ


def sector_dimension(L: int, M: int) -> int:
    return math.comb(L, M)


@dataclass
class SectorOperator:
    """Dense complex matrix acting on one magnetization sector."""

    basis: SectorBasis
    matrix: np.ndarray

    def __post_init__(self):
        d = self.basis.dim
        if self.matrix.shape != (d, d):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match sector dim {d}"
            )

    @property
    def dim(self) -> int:
        return self.basis.dim

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self.matrix))

    def hermiticity_residual(self) -> float:
        """|| A - A^dagger ||_F / max(1, ||A||_F)."""
        a = self.matrix
        return float(np.linalg.norm(a - a.conj().T) / max(1.0, np.linalg.norm(a)))

    def commutator_norm(self, other: "SectorOperator") -> float:
        a, b = self.matrix, other.matrix
        return float(np.linalg.norm(a @ b - b @ a))

    def to_triplets(self, tol: float = 0.0) -> list[tuple[int, int, float, float]]:
        """Sparse triplet list (row, col, re, im), entries with |a| > tol."""
        rows, cols = np.nonzero(np.abs(self.matrix) > tol)
        return [
            (int(r), int(c), float(self.matrix[r, c].real), float(self.matrix[r, c].imag))
            for r, c in zip(rows, cols)
        ]

    def __add__(self, other: "SectorOperator") -> "SectorOperator":
        return SectorOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other: "SectorOperator") -> "SectorOperator":
        return SectorOperator(self.basis, self.matrix - other.matrix)

    def __matmul__(self, other: "SectorOperator") -> "SectorOperator":
        return SectorOperator(self.basis, self.matrix @ other.matrix)
