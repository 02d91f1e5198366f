"""Shared oracles for the test suite.

These builders deliberately avoid the package's contraction code paths:
the transfer-matrix oracle sums explicit auxiliary paths with Kronecker
products, the spin-chain oracles assemble bond terms from bitmasks, and
the free-fermion oracle fills single-particle modes.  They exist so the
production implementations are checked against independent constructions.
"""

import itertools
import math

import numpy as np
import pytest

from sgvertex.params import ModelParams
from sgvertex.smatrix import s_matrix, s_matrix_derivative


def brute_site_op(S, a_out, a_in):
    """2x2 site operator <s_out, a_out| S |s_in, a_in> at fixed auxiliary bits."""
    return np.array(
        [[S[(so << 1) | a_out, (si << 1) | a_in] for si in (0, 1)] for so in (0, 1)]
    )


def brute_transfer_full(t, params: ModelParams, deriv=False) -> np.ndarray:
    """Transfer matrix on the full 2^L space by explicit path summation."""
    L, eta = params.L, params.eta
    xi = params.inhomogeneities()
    dim = 2**L
    total = np.zeros((dim, dim), dtype=complex)
    sites_s = [s_matrix(t - xi[i], eta) for i in range(L)]
    sites_d = [s_matrix_derivative(t - xi[i], eta) for i in range(L)]
    reps = range(L) if deriv else [None]
    for rep in reps:
        for path in itertools.product((0, 1), repeat=L):
            op = np.eye(1, dtype=complex)
            for i in range(L):
                S = sites_d[i] if i == rep else sites_s[i]
                op = np.kron(brute_site_op(S, path[i], path[(i + 1) % L]), op)
            total += op
    return total


def restrict_to_sector(full: np.ndarray, L: int, M: int) -> np.ndarray:
    states = [s for s in range(1 << L) if bin(s).count("1") == M]
    return np.array([[full[r, c] for c in states] for r in states])


def xxz_chain_reference(L: int, M: int, delta: float) -> np.ndarray:
    """Nearest-neighbour XXZ bond Hamiltonian on the M-sector, periodic.

    Bond: b_i^+ b_{i+1} + h.c. + delta * (n n + (1-n)(1-n)).
    """
    states = [s for s in range(1 << L) if bin(s).count("1") == M]
    index = {s: k for k, s in enumerate(states)}
    mat = np.zeros((len(states), len(states)), dtype=complex)
    for k, s in enumerate(states):
        diag = 0.0
        for i in range(L):
            j = (i + 1) % L
            ni, nj = (s >> i) & 1, (s >> j) & 1
            if ni == nj:
                diag += delta
            if nj == 1 and ni == 0:
                new = (s & ~(1 << j)) | (1 << i)
                mat[index[new], k] += 1.0
                mat[k, index[new]] += 1.0
        mat[k, k] += diag
    return mat


def free_fermion_sector_energies(L: int, M: int) -> np.ndarray:
    """All M-particle energies of the periodic XX chain via mode filling.

    Hard-core bosons on a ring map to fermions with a parity-dependent
    boundary: M even fills antiperiodic modes, M odd periodic ones; each
    mode contributes 2 cos k.
    """
    shift = 0.5 if M % 2 == 0 else 0.0
    ks = 2.0 * math.pi * (np.arange(L) + shift) / L
    eps = 2.0 * np.cos(ks)
    out = [sum(eps[list(pick)]) for pick in itertools.combinations(range(L), M)]
    return np.sort(np.array(out))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
