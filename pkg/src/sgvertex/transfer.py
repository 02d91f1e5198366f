"""Inhomogeneous transfer matrix by auxiliary-space contraction.

Z(t) is the trace over a two-dimensional auxiliary space of the ordered
product of vertex operators, one per site, with the site's spectral
argument shifted by its inhomogeneity (t - xi_i, xi alternating 0/theta).
Columns are built by propagating amplitudes through the chain: the
auxiliary bond index takes two values, so each input configuration fans
out into at most 2 * dim partial states and the cost stays at
O(L * dim^2) per operator instead of touching the full 2^L space.
"""

from __future__ import annotations

import cmath

import numpy as np

from .basis import SectorBasis, SectorOperator
from .params import ModelParams


def _site_weights(t: complex, xi: float, eta: float) -> tuple[complex, complex, complex]:
    """(aligned, anti-aligned, exchange) weights at argument t - xi."""
    arg = t - xi
    return (
        cmath.sinh(arg + 1j * eta),
        cmath.sinh(arg),
        cmath.sinh(1j * eta),
    )


def _site_weights_derivative(t: complex, xi: float, eta: float):
    arg = t - xi
    return (cmath.cosh(arg + 1j * eta), cmath.cosh(arg), 0.0 + 0.0j)


def _propagate_column(state: int, weights: list, L: int, index: dict) -> dict[int, complex]:
    """Amplitudes of Z(t)|state> over the sector basis.

    weights[i] = (wa, wb, wc) for site i.  An amplitude is tracked per
    (aux_start, aux_current, partial_output_bits); at each site the input
    bit either passes through (aligned weight wa when it matches the
    auxiliary bit, wb otherwise) or swaps with the auxiliary bit (wc).
    """
    # key: (aux_start, aux_cur, out_bits_so_far) -> amplitude
    amps = {(0, 0, 0): 1.0 + 0.0j, (1, 1, 0): 1.0 + 0.0j}
    for i in range(L):
        s_i = (state >> i) & 1
        nxt: dict = {}
        for (a0, a, pre), amp in amps.items():
            wa, wb, wc = weights[i]
            if a == s_i:
                # pass-through, aligned
                if wa != 0.0:
                    key = (a0, a, pre | (s_i << i))
                    nxt[key] = nxt.get(key, 0.0) + amp * wa
                # exchange with the auxiliary line
                if wc != 0.0:
                    flip = 1 - s_i
                    key = (a0, flip, pre | (flip << i))
                    nxt[key] = nxt.get(key, 0.0) + amp * wc
            else:
                # pass-through, anti-aligned
                if wb != 0.0:
                    key = (a0, a, pre | (s_i << i))
                    nxt[key] = nxt.get(key, 0.0) + amp * wb
        amps = nxt
    col: dict[int, complex] = {}
    for (a0, a, out), amp in amps.items():
        if a == a0:
            col[out] = col.get(out, 0.0) + amp
    return {index[s]: v for s, v in col.items()}


def transfer_matrix(t: complex, params: ModelParams, M: int | None = None) -> SectorOperator:
    """Z(t) restricted to the M-sector (defaults to params.M)."""
    M = params.M if M is None else M
    basis = SectorBasis.build(params.L, M)
    xi = params.inhomogeneities()
    weights = [_site_weights(t, xi[i], params.eta) for i in range(params.L)]
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for k, state in enumerate(basis.states):
        for row, val in _propagate_column(state, weights, params.L, basis.index).items():
            mat[row, k] = val
    return SectorOperator(basis, mat)


def transfer_matrix_derivative(
    t: complex, params: ModelParams, M: int | None = None
) -> SectorOperator:
    """dZ/dt at argument t, by the product rule over sites."""
    M = params.M if M is None else M
    basis = SectorBasis.build(params.L, M)
    xi = params.inhomogeneities()
    base = [_site_weights(t, xi[i], params.eta) for i in range(params.L)]
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for j in range(params.L):
        weights = list(base)
        weights[j] = _site_weights_derivative(t, xi[j], params.eta)
        for k, state in enumerate(basis.states):
            for row, val in _propagate_column(state, weights, params.L, basis.index).items():
                mat[row, k] += val
    return SectorOperator(basis, mat)
