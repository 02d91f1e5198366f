import math

import numpy as np
import pytest

from sgvertex.basis import SectorBasis, SectorOperator
from sgvertex.errors import DimensionExceededError
from sgvertex.hamiltonian import hamiltonian_logderiv
from sgvertex.params import ModelParams
from sgvertex.spectra import (
    compare_spectra,
    diagonalize,
    spectrum_contains,
    translation_labels,
    translation_operator,
)

from conftest import free_fermion_sector_energies


def test_identity_operator():
    basis = SectorBasis.build(6, 3)
    op = SectorOperator(basis, np.eye(basis.dim, dtype=complex))
    spec = diagonalize(op)
    assert np.allclose(spec.eigenvalues, 1.0)
    assert spec.hermitian


def test_free_fermion_point():
    # theta = 0 at Delta = 0 is the XX chain; mode filling is the oracle
    p = ModelParams(eta=math.pi / 2, theta=0.0, L=4, M=2)
    spec = diagonalize(hamiltonian_logderiv(p))
    oracle = free_fermion_sector_energies(4, 2)
    assert np.max(np.abs(np.sort(np.real(spec.eigenvalues)) - oracle)) < 1e-10


def test_free_fermion_point_larger():
    p = ModelParams(eta=math.pi / 2, theta=0.0, L=8, M=3)
    spec = diagonalize(hamiltonian_logderiv(p))
    oracle = free_fermion_sector_energies(8, 3)
    assert np.max(np.abs(np.sort(np.real(spec.eigenvalues)) - oracle)) < 1e-10


def test_lowest_k_subset_of_full():
    p = ModelParams(eta=0.9, theta=1.0, L=8, M=4)
    op = hamiltonian_logderiv(p)
    full = diagonalize(op)
    low = diagonalize(op, mode="lowest_k", k=3)
    assert np.max(np.abs(low.eigenvalues - np.real(full.eigenvalues[:3]))) <= 1e-9


def test_eigenvector_residuals():
    p = ModelParams(eta=0.9, theta=1.0, L=6, M=3)
    op = hamiltonian_logderiv(p)
    spec = diagonalize(op)
    h = 0.5 * (op.matrix + op.matrix.conj().T)
    for k in range(spec.basis.dim):
        v = spec.eigenvectors[:, k]
        assert np.linalg.norm(h @ v - spec.eigenvalues[k] * v) <= 1e-9


def test_dimension_cap():
    basis = SectorBasis.build(4, 2)
    op = SectorOperator(basis, np.eye(6, dtype=complex))
    import sgvertex.spectra as spectra_mod

    old = spectra_mod.FULL_DIM_CAP
    spectra_mod.FULL_DIM_CAP = 5
    try:
        with pytest.raises(DimensionExceededError):
            diagonalize(op)
    finally:
        spectra_mod.FULL_DIM_CAP = old


def test_translation_labels_unimodular_and_trace():
    p = ModelParams(eta=0.9, theta=1.0, L=8, M=4)
    spec = translation_labels(diagonalize(hamiltonian_logderiv(p), params=p), p)
    labels = spec.momentum_labels
    assert np.max(np.abs(np.abs(labels) - 1.0)) < 1e-9
    # ground state label has unit modulus (and is a pure phase)
    assert abs(abs(labels[0]) - 1.0) < 1e-10
    # sum of labels^(L/2) = trace of the L-site translation = dim of sector
    total = np.sum(labels ** (p.L // 2))
    assert total.real == pytest.approx(spec.basis.dim, abs=1e-6)
    assert abs(total.imag) < 1e-6


def test_translation_labels_adiabatic_stability():
    p1 = ModelParams(eta=0.9, theta=1.0, L=6, M=3)
    p2 = ModelParams(eta=0.9 + 1e-6, theta=1.0, L=6, M=3)
    l1 = translation_labels(diagonalize(hamiltonian_logderiv(p1)), p1).momentum_labels
    l2 = translation_labels(diagonalize(hamiltonian_logderiv(p2)), p2).momentum_labels
    m1 = np.sort_complex(np.round(l1, 6))
    m2 = np.sort_complex(np.round(l2, 6))
    assert np.max(np.abs(m1 - m2)) < 1e-4


def test_compare_spectra_trivials():
    p = ModelParams(eta=0.9, theta=1.0, L=6, M=3)
    a = diagonalize(hamiltonian_logderiv(p))
    rep = compare_spectra(a, a, tol=1e-12)
    assert rep["max_abs_diff"] == 0.0 and rep["passed"]
    shifted = SectorOperator(a.basis, np.diag(a.eigenvalues + 0.25).astype(complex))
    b = diagonalize(shifted)
    rep2 = compare_spectra(a, b, tol=1e-12)
    assert rep2["mean_abs_diff"] == pytest.approx(0.25, abs=1e-10)
    assert not rep2["passed"]


def test_compare_spectra_size_mismatch():
    pa = ModelParams(eta=0.9, theta=1.0, L=6, M=3)
    pb = ModelParams(eta=0.9, theta=1.0, L=6, M=2)
    a = diagonalize(hamiltonian_logderiv(pa))
    b = diagonalize(hamiltonian_logderiv(pb))
    with pytest.raises(ValueError):
        compare_spectra(a, b, tol=1e-8)


def test_spectrum_contains():
    p = ModelParams(eta=0.9, theta=1.0, L=6, M=3)
    a = diagonalize(hamiltonian_logderiv(p))
    rep = spectrum_contains(a, [a.ground_energy], tol=1e-12)
    assert rep["passed"]
    rep2 = spectrum_contains(a, [a.ground_energy - 0.1], tol=1e-12)
    assert not rep2["passed"]


def test_non_hermitian_flagged_not_symmetrized():
    basis = SectorBasis.build(4, 2)
    mat = np.diag(np.arange(6, dtype=complex))
    mat[0, 1] = 0.5  # deliberately non-hermitian
    spec = diagonalize(SectorOperator(basis, mat))
    assert not spec.hermitian
    assert np.max(np.abs(np.sort(np.real(spec.eigenvalues)) - np.arange(6))) < 1e-12
