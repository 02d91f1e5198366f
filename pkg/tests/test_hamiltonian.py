import math

import numpy as np
import pytest

from sgvertex.basis import SectorBasis
from sgvertex.errors import ReconciliationError
from sgvertex.hamiltonian import (
    decoupled_chains,
    decoupled_spectrum_union,
    decoupling_transform,
    hamiltonian_h0,
    hamiltonian_local,
    hamiltonian_logderiv,
    interaction_first_order,
    reconcile,
    sublattice_number_commutators,
)
from sgvertex.params import ModelParams
from sgvertex.spectra import translation_operator

from conftest import brute_transfer_full, restrict_to_sector, xxz_chain_reference

ETA_GRID = (0.5, 2 * math.pi / 5, 2.0)
THETA_GRID = (0.5, 1.0, 2.0)


def test_logderiv_ground_state_frozen_value():
    # frozen from an independent 2^L path-sum construction of Z and Z'
    p = ModelParams(eta=0.7, theta=1.0, L=4, M=2)
    h = hamiltonian_logderiv(p)
    ev = np.sort(np.linalg.eigvalsh(0.5 * (h.matrix + h.matrix.conj().T)))
    assert ev[0] == pytest.approx(-1.9127688127008167, abs=1e-12)


def test_logderiv_matches_brute_force_construction():
    p = ModelParams(eta=0.7, theta=1.0, L=4, M=2)
    z0 = brute_transfer_full(0.0, p)
    zd0 = brute_transfer_full(0.0, p, deriv=True)
    zt = brute_transfer_full(p.theta, p)
    zdt = brute_transfer_full(p.theta, p, deriv=True)
    full = 0.5 * np.sinh(1j * p.eta) * (
        np.linalg.solve(z0, zd0) + np.linalg.solve(zt, zdt)
    )
    expected = restrict_to_sector(full, 4, 2)
    h = hamiltonian_logderiv(p)
    assert np.linalg.norm(h.matrix - expected) < 1e-12


def test_hermiticity_residual_grid():
    for eta in (0.5, math.pi / 2, 2.0):
        for theta in (0.5, 2.0):
            for L in (4, 6):
                p = ModelParams(eta=eta, theta=theta, L=L, M=L // 2)
                h = hamiltonian_logderiv(p, check_hermiticity=False)
                assert h.hermiticity_residual() <= 1e-10


def test_reconciliation_scale_and_shift():
    sigmas, shifts = [], []
    for eta in ETA_GRID:
        for theta in THETA_GRID:
            p = ModelParams(eta=eta, theta=theta, L=6, M=3)
            s, c, r = reconcile(hamiltonian_local(p), hamiltonian_logderiv(p))
            assert r <= 1e-9
            sigmas.append(s)
            shifts.append(c)
    # the pair is parameter independent: the local sum double counts the
    # defining log-derivative normalization and needs no energy shift
    assert max(sigmas) - min(sigmas) < 1e-10
    assert max(abs(c) for c in shifts) < 1e-10
    assert sigmas[0] == pytest.approx(2.0, abs=1e-12)


def test_reconciliation_failure_signals():
    p = ModelParams(eta=0.9, theta=1.0, L=6, M=3)
    a = hamiltonian_local(p)
    b = hamiltonian_h0(p)  # wrong operator on purpose
    with pytest.raises(ReconciliationError):
        reconcile(a, b)


def test_singular_transfer_guard():
    import sgvertex.hamiltonian as ham_mod
    from sgvertex.errors import SingularTransferMatrixError

    p = ModelParams(eta=0.9, theta=1.0, L=4, M=2)
    old = ham_mod.COND_LIMIT
    ham_mod.COND_LIMIT = 1.0  # force the guard to fire
    try:
        with pytest.raises(SingularTransferMatrixError):
            hamiltonian_logderiv(p)
    finally:
        ham_mod.COND_LIMIT = old


def test_local_three_site_support():
    p = ModelParams(eta=0.9, theta=1.3, L=8, M=4)
    h = hamiltonian_local(p)
    basis = h.basis
    L = p.L
    windows = [{i % L, (i + 1) % L, (i + 2) % L} for i in range(L)]
    for r in range(basis.dim):
        for c in range(basis.dim):
            if abs(h.matrix[r, c]) < 1e-12 or r == c:
                continue
            changed = {
                i for i in range(L) if ((basis.states[r] ^ basis.states[c]) >> i) & 1
            }
            assert any(changed <= w for w in windows), changed


def test_translation_by_two_commutes():
    p = ModelParams(eta=0.9, theta=1.3, L=8, M=4)
    h = hamiltonian_local(p)
    t2 = translation_operator(h.basis, 2)
    assert np.linalg.norm(h.matrix @ t2 - t2 @ h.matrix) <= 1e-10


def test_theta_zero_matches_homogeneous_chain():
    for L in (6, 8, 10):
        p = ModelParams(eta=0.8, theta=0.0, L=L, M=L // 2)
        h = hamiltonian_logderiv(p)
        ref = xxz_chain_reference(L, L // 2, math.cos(0.8))
        ev = np.sort(np.linalg.eigvalsh(0.5 * (h.matrix + h.matrix.conj().T)))
        ev_ref = np.sort(np.linalg.eigvalsh(ref))
        # affine comparison: fit scale and shift on the sorted spectra
        design = np.column_stack([ev_ref, np.ones_like(ev_ref)])
        coef, *_ = np.linalg.lstsq(design, ev, rcond=None)
        assert np.max(np.abs(design @ coef - ev)) < 1e-9
        assert coef[0] == pytest.approx(1.0, abs=1e-9)
        assert coef[1] == pytest.approx(0.0, abs=1e-9)


def test_h0_is_large_theta_limit():
    for L, M, eta in ((6, 3, 0.7), (8, 4, 2 * math.pi / 5)):
        h0 = hamiltonian_h0(ModelParams(eta=eta, theta=1.0, L=L, M=M))
        r_prev = None
        for theta in (8.0, 10.0, 12.0):
            h = hamiltonian_local(ModelParams(eta=eta, theta=theta, L=L, M=M))
            r = np.linalg.norm(h.matrix - h0.matrix) / np.linalg.norm(h0.matrix)
            # O(exp(-theta)) decay with a modest constant
            assert r < 10.0 * math.exp(-theta)
            if r_prev is not None:
                assert r < r_prev
            r_prev = r


def test_h0_conserves_sublattice_numbers():
    p = ModelParams(eta=1.1, theta=1.0, L=8, M=3)
    c1, c2 = sublattice_number_commutators(hamiltonian_h0(p))
    assert c1 <= 1e-12 and c2 <= 1e-12


def test_decoupling_transform_unimodular_diagonal():
    p = ModelParams(eta=0.9, theta=1.0, L=8, M=4)
    u = decoupling_transform(p)
    off = u.matrix - np.diag(np.diag(u.matrix))
    assert np.linalg.norm(off) == 0.0
    assert np.max(np.abs(np.abs(np.diag(u.matrix)) - 1.0)) < 1e-14


def test_decoupling_conjugation_gives_twisted_chains():
    for L, M, eta in ((8, 4, 0.9), (8, 3, 2 * math.pi / 5), (6, 3, 2.2)):
        p = ModelParams(eta=eta, theta=1.0, L=L, M=M)
        h0 = hamiltonian_h0(p)
        u = decoupling_transform(p)
        conj = u.matrix.conj().T @ h0.matrix @ u.matrix
        assert np.linalg.norm(conj - decoupled_chains(p).matrix) < 1e-12


def test_h0_spectrum_equals_twisted_union():
    for eta in (0.9, math.pi / 2):
        p = ModelParams(eta=eta, theta=1.0, L=8, M=4)
        ev = np.sort(np.linalg.eigvalsh(hamiltonian_h0(p).matrix))
        union = decoupled_spectrum_union(p)
        assert np.max(np.abs(ev - union)) <= 1e-10


def test_interaction_entries_and_selection_rule():
    p = ModelParams(eta=1.1, theta=2.0, L=6, M=3)
    v = interaction_first_order(p)
    amp = 2.0 * math.sin(p.eta) ** 2 * math.exp(-p.theta)
    basis = v.basis
    nz = np.abs(v.matrix) > 1e-15
    assert np.all(np.abs(v.matrix[nz]) == pytest.approx(amp, rel=1e-12))
    odd_sites = [0, 2, 4]
    for r in range(basis.dim):
        for c in range(basis.dim):
            if not nz[r, c]:
                continue
            n_odd_r = sum((basis.states[r] >> i) & 1 for i in odd_sites)
            n_odd_c = sum((basis.states[c] >> i) & 1 for i in odd_sites)
            assert abs(n_odd_r - n_odd_c) == 1


def test_first_order_extraction_amplitude():
    # d H / d h at h = 0 by a three-point fit in h = exp(-theta); elements
    # whose hop has equally occupied outer neighbours carry the bare
    # amplitude exactly (after removing the recorded overall scale)
    eta = 2 * math.pi / 5
    L, M = 6, 3
    p1 = ModelParams(eta=eta, theta=1.0, L=L, M=M)
    h0 = hamiltonian_h0(p1)
    thetas = [10.0, 12.0, 14.0]
    hs = np.exp([-t for t in thetas])
    mats = [
        hamiltonian_local(ModelParams(eta=eta, theta=t, L=L, M=M)).matrix - h0.matrix
        for t in thetas
    ]
    design = np.column_stack([hs, hs**2, hs**3])
    coef = np.linalg.solve(design, np.array([m.ravel() for m in mats]))
    deriv = coef[0].reshape(mats[0].shape)
    sigma, _, _ = reconcile(hamiltonian_local(p1), hamiltonian_logderiv(p1))
    amp = 2.0 * math.sin(eta) ** 2
    basis = h0.basis
    n_clean = 0
    for r in range(basis.dim):
        for c in range(basis.dim):
            val = deriv[r, c] / sigma
            if abs(val) < 1e-8:
                continue
            bits = [i for i in range(L) if ((basis.states[r] ^ basis.states[c]) >> i) & 1]
            if len(bits) != 2:
                continue
            i, j = bits
            if (j - i) % L not in (1, L - 1):
                continue
            lo = i if (j - i) % L == 1 else j
            hi = (lo + 1) % L
            nl = (basis.states[c] >> ((lo - 1) % L)) & 1
            nr = (basis.states[c] >> ((hi + 1) % L)) & 1
            if nl == nr:
                n_clean += 1
                assert abs(val) == pytest.approx(amp, rel=1e-6)
            else:
                # dressed elements: residual is the dropped-factor content
                assert abs(val - amp) > 0.1
    assert n_clean > 0


def test_first_order_remainder_scales_as_h_squared():
    eta, L, M = 0.9, 6, 3
    p1 = ModelParams(eta=eta, theta=1.0, L=L, M=M)
    h0 = hamiltonian_h0(p1).matrix
    thetas = [10.0, 12.0, 14.0]
    hs = np.exp([-t for t in thetas])
    mats = [
        hamiltonian_local(ModelParams(eta=eta, theta=t, L=L, M=M)).matrix - h0
        for t in thetas
    ]
    design = np.column_stack([hs, hs**2, hs**3])
    coef = np.linalg.solve(design, np.array([m.ravel() for m in mats]))
    deriv = coef[0].reshape(mats[0].shape)
    norms = []
    for theta in (8.0, 10.0, 12.0):
        h = hamiltonian_local(ModelParams(eta=eta, theta=theta, L=L, M=M)).matrix
        rest = h - h0 - math.exp(-theta) * deriv
        norms.append(np.linalg.norm(rest))
    # slope check on theta grid {8, 10, 12}: each step of 2 shrinks the
    # remainder by about exp(-4)
    for a, b in zip(norms, norms[1:]):
        assert b < a * math.exp(-2.0)
    assert norms[0] < 100.0 * math.exp(-16.0)
