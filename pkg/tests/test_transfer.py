import numpy as np
import pytest

from sgvertex.basis import SectorBasis
from sgvertex.params import ModelParams
from sgvertex.transfer import (
    _propagate_column,
    _site_weights,
    _site_weights_derivative,
    transfer_matrix,
    transfer_matrix_derivative,
)

from conftest import brute_transfer_full, restrict_to_sector

P4 = ModelParams(eta=0.7, theta=1.0, L=4, M=2)


def test_against_brute_force_paths():
    z = transfer_matrix(0.3, P4)
    full = brute_transfer_full(0.3, P4)
    expected = restrict_to_sector(full, 4, 2)
    assert np.linalg.norm(z.matrix - expected) < 1e-13


def test_full_construction_preserves_sectors():
    full = brute_transfer_full(0.3, P4)
    for m1 in range(5):
        rows = [s for s in range(16) if bin(s).count("1") == m1]
        for m2 in range(5):
            if m1 == m2:
                continue
            cols = [s for s in range(16) if bin(s).count("1") == m2]
            block = np.array([[full[r, c] for c in cols] for r in rows])
            assert np.linalg.norm(block) == 0.0


def test_commuting_family():
    p = ModelParams(eta=0.9, theta=0.8, L=6, M=3)
    for M in range(7):
        z1 = transfer_matrix(0.37, p, M)
        z2 = transfer_matrix(-0.81, p, M)
        assert z1.commutator_norm(z2) <= 1e-10


def test_theta_zero_t_zero_is_shift():
    p = ModelParams(eta=0.7, theta=0.0, L=6, M=3)
    z = transfer_matrix(0.0, p)
    c0 = np.sinh(1j * 0.7)
    t = z.matrix / c0**6
    basis = z.basis
    for k, s in enumerate(basis.states):
        shifted = 0
        for i in range(6):
            shifted |= (((s >> ((i + 1) % 6)) & 1) << i)
        col = t[:, k]
        assert abs(col[basis.index[shifted]] - 1.0) < 1e-12
        assert np.linalg.norm(np.delete(col, basis.index[shifted])) < 1e-12


def test_derivative_finite_difference():
    zd = transfer_matrix_derivative(0.3, P4)
    d = 1e-5
    fd = (transfer_matrix(0.3 + d, P4).matrix - transfer_matrix(0.3 - d, P4).matrix) / (2 * d)
    assert np.linalg.norm(fd - zd.matrix) < 1e-8


def test_derivative_richardson_at_zero():
    # two-step Richardson kills the O(d^2) error of the centered difference
    zd = transfer_matrix_derivative(0.0, P4).matrix

    def fd(d):
        return (transfer_matrix(d, P4).matrix - transfer_matrix(-d, P4).matrix) / (2 * d)

    extrap = (4 * fd(5e-4) - fd(1e-3)) / 3
    assert np.linalg.norm(extrap - zd) < 1e-10


def test_derivative_against_brute_force():
    zd = transfer_matrix_derivative(0.3, P4)
    full = brute_transfer_full(0.3, P4, deriv=True)
    expected = restrict_to_sector(full, 4, 2)
    assert np.linalg.norm(zd.matrix - expected) < 1e-12


def test_derivative_site_sum_linearity():
    # the product rule is a sum over single-site replacements: dropping one
    # site's contribution changes the result by exactly that contraction
    p = P4
    basis = SectorBasis.build(p.L, p.M)
    xi = p.inhomogeneities()
    t = 0.3
    base = [_site_weights(t, xi[i], p.eta) for i in range(p.L)]

    def single(j):
        weights = list(base)
        weights[j] = _site_weights_derivative(t, xi[j], p.eta)
        mat = np.zeros((basis.dim, basis.dim), dtype=complex)
        for k, state in enumerate(basis.states):
            for row, val in _propagate_column(state, weights, p.L, basis.index).items():
                mat[row, k] += val
        return mat

    parts = [single(j) for j in range(p.L)]
    total = transfer_matrix_derivative(t, p).matrix
    assert np.linalg.norm(total - sum(parts)) < 1e-12
    assert np.linalg.norm((total - parts[2]) - sum(parts[j] for j in (0, 1, 3))) < 1e-12
