"""Trigonometric two-site vertex weights and the Yang-Baxter check.

The two-site operator acts on the pair basis (00, 01, 10, 11), where bit 1
marks an up spin and the pair index is (first_site << 1) | second_site.
Aligned pairs carry weight sinh(t + i*eta), anti-aligned diagonal entries
sinh(t), and the two exchange entries sinh(i*eta).  The same matrix holds
in the (up-up, up-down, down-up, down-down) reading since the structure is
invariant under a global spin flip.
"""

from __future__ import annotations

import cmath

import numpy as np

PERMUTATION_4 = np.array(
    [
        [1, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
    ],
    dtype=complex,
)


def s_matrix(t: complex, eta: float) -> np.ndarray:
    """4x4 vertex operator S(t) on two sites."""
    a = cmath.sinh(t + 1j * eta)
    b = cmath.sinh(t)
    c = cmath.sinh(1j * eta)
    return np.array(
        [
            [a, 0, 0, 0],
            [0, b, c, 0],
            [0, c, b, 0],
            [0, 0, 0, a],
        ],
        dtype=complex,
    )


def s_matrix_derivative(t: complex, eta: float) -> np.ndarray:
    """Entrywise derivative dS/dt: cosh on the diagonals, zero exchange."""
    da = cmath.cosh(t + 1j * eta)
    db = cmath.cosh(t)
    return np.array(
        [
            [da, 0, 0, 0],
            [0, db, 0, 0],
            [0, 0, db, 0],
            [0, 0, 0, da],
        ],
        dtype=complex,
    )


def _embed_pair(op4: np.ndarray, pair: tuple[int, int], nsites: int) -> np.ndarray:
    """Embed a 4x4 two-site operator acting on (pair[0], pair[1]) of nsites spins.

    Local configurations are indexed by sum(bit_k << k); the two-site matrix
    sees the pair index (bit_first << 1) | bit_second.
    """
    dim = 1 << nsites
    p, q = pair
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bp, bq = (col >> p) & 1, (col >> q) & 1
        cin = (bp << 1) | bq
        rest = col & ~((1 << p) | (1 << q))
        for cout in range(4):
            w = op4[cout, cin]
            if w == 0:
                continue
            row = rest | ((cout >> 1) << p) | ((cout & 1) << q)
            out[row, col] += w
    return out


def yang_baxter_residual(t1: float, t2: float, eta: float) -> float:
    """Frobenius norm of S12(t1-t2) S13(t1) S23(t2) - S23(t2) S13(t1) S12(t1-t2)."""
    s12 = _embed_pair(s_matrix(t1 - t2, eta), (0, 1), 3)
    s13 = _embed_pair(s_matrix(t1, eta), (0, 2), 3)
    s23 = _embed_pair(s_matrix(t2, eta), (1, 2), 3)
    lhs = s12 @ s13 @ s23
    rhs = s23 @ s13 @ s12
    return float(np.linalg.norm(lhs - rhs))
