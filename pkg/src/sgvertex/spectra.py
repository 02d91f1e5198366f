"""Sector-resolved diagonalization and spectrum comparison utilities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .basis import SectorBasis, SectorOperator
from .errors import DimensionExceededError, NonConvergenceError
from .params import ModelParams

FULL_DIM_CAP = 20000
HERMITIAN_TOL = 1e-10
DEGENERACY_TOL = 1e-9


@dataclass
class SpectrumResult:
    """Eigenvalues of one sector operator, sorted by (real part of) energy."""

    basis: SectorBasis
    eigenvalues: np.ndarray
    hermitian: bool
    params: ModelParams | None = None
    momentum_labels: np.ndarray | None = None
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def ground_energy(self) -> float:
        return float(np.real(self.eigenvalues[0]))

    def as_dict(self) -> dict:
        out = {
            "L": self.basis.L,
            "M": self.basis.M,
            "hermitian": self.hermitian,
            "ground_energy": self.ground_energy,
            "eigenvalues_re": [float(v) for v in np.real(self.eigenvalues)],
            "eigenvalues_im": [float(v) for v in np.imag(self.eigenvalues)],
        }
        if self.params is not None:
            out["params"] = self.params.as_dict()
        if self.momentum_labels is not None:
            out["momentum_label_re"] = [float(v) for v in np.real(self.momentum_labels)]
            out["momentum_label_im"] = [float(v) for v in np.imag(self.momentum_labels)]
        return out


def diagonalize(
    op: SectorOperator,
    mode: str = "full",
    k: int = 6,
    params: ModelParams | None = None,
    keep_vectors: bool = True,
) -> SpectrumResult:
    """Full dense spectrum, or the lowest k levels iteratively.

    Hermitian input (residual below 1e-10) goes through the symmetric
    solver; otherwise the general solver runs and the result is flagged,
    never symmetrized.
    """
    dim = op.dim
    hermitian = op.hermiticity_residual() <= HERMITIAN_TOL
    if mode == "full":
        if dim > FULL_DIM_CAP:
            raise DimensionExceededError(f"sector dimension {dim} above cap {FULL_DIM_CAP}")
        if hermitian:
            sym = 0.5 * (op.matrix + op.matrix.conj().T)
            vals, vecs = scipy.linalg.eigh(sym)
        else:
            vals, vecs = scipy.linalg.eig(op.matrix)
            order = np.argsort(vals.real, kind="stable")
            vals, vecs = vals[order], vecs[:, order]
        return SpectrumResult(
            basis=op.basis,
            eigenvalues=vals,
            hermitian=hermitian,
            params=params,
            eigenvectors=vecs if keep_vectors else None,
        )
    if mode == "lowest_k":
        if not hermitian:
            raise NonConvergenceError("iterative mode requires a hermitian operator")
        if k >= dim - 1:
            return diagonalize(op, "full", params=params, keep_vectors=keep_vectors)
        sparse = scipy.sparse.csr_matrix(op.matrix)
        try:
            vals, vecs = scipy.sparse.linalg.eigsh(sparse, k=k, which="SA", maxiter=5000)
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise NonConvergenceError("iterative eigensolver did not converge") from exc
        order = np.argsort(vals)
        return SpectrumResult(
            basis=op.basis,
            eigenvalues=vals[order],
            hermitian=True,
            params=params,
            eigenvectors=vecs[:, order] if keep_vectors else None,
        )
    raise ValueError(f"unknown mode {mode!r}")


def translation_operator(basis: SectorBasis, shift: int = 2) -> np.ndarray:
    """Permutation matrix of the cyclic site shift by `shift` on the sector."""
    L = basis.L
    mask = (1 << L) - 1
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for k, s in enumerate(basis.states):
        rotated = ((s << shift) | (s >> (L - shift))) & mask
        mat[basis.index[rotated], k] = 1.0
    return mat


def translation_labels(
    spectrum: SpectrumResult, params: ModelParams, tol: float = 1e-8
) -> SpectrumResult:
    """Attach two-site-translation eigenvalues to each level.

    Degenerate clusters (within 1e-9) are resolved by diagonalizing the
    translation restricted to the cluster, so every level receives a
    unimodular label.  Fails when [H, T^2] is not small on the spectrum's
    own operator data (checked through the eigenbasis residual).
    """
    if spectrum.eigenvectors is None:
        raise ValueError("translation labels need stored eigenvectors")
    t2 = translation_operator(spectrum.basis, 2)
    vecs = spectrum.eigenvectors
    vals = np.real(spectrum.eigenvalues)
    w = vecs.conj().T @ t2 @ vecs
    # commutation check in the eigenbasis: off-cluster blocks must vanish
    labels = np.zeros(len(vals), dtype=complex)
    start = 0
    n = len(vals)
    off_norm2 = 0.0
    while start < n:
        stop = start + 1
        while stop < n and vals[stop] - vals[stop - 1] <= DEGENERACY_TOL:
            stop += 1
        block = w[start:stop, start:stop]
        lab, _ = np.linalg.eig(block) if stop - start > 1 else (np.array([block[0, 0]]), None)
        labels[start:stop] = lab[np.argsort(np.angle(lab), kind="stable")]
        off_norm2 += float(np.linalg.norm(w[start:stop, stop:]) ** 2)
        off_norm2 += float(np.linalg.norm(w[start:stop, :start]) ** 2)
        start = stop
    if np.sqrt(off_norm2) > tol:
        raise ValueError(
            f"translation does not commute with the operator: residual {np.sqrt(off_norm2):.3e}"
        )
    return SpectrumResult(
        basis=spectrum.basis,
        eigenvalues=spectrum.eigenvalues,
        hermitian=spectrum.hermitian,
        params=params,
        momentum_labels=labels,
        eigenvectors=spectrum.eigenvectors,
    )


def compare_spectra(a: SpectrumResult, b: SpectrumResult, tol: float) -> dict:
    """Greedy sorted pairing of two equal-size spectra."""
    if len(a.eigenvalues) != len(b.eigenvalues):
        raise ValueError(
            f"size mismatch: {len(a.eigenvalues)} vs {len(b.eigenvalues)} levels"
        )
    va = np.sort(np.real(a.eigenvalues))
    vb = np.sort(np.real(b.eigenvalues))
    diff = np.abs(va - vb)
    return {
        "max_abs_diff": float(diff.max()),
        "mean_abs_diff": float(diff.mean()),
        "tol": tol,
        "passed": bool(diff.max() <= tol),
    }


def spectrum_contains(spectrum: SpectrumResult, values, tol: float) -> dict:
    """Check every value appears among the spectrum's energies within tol."""
    ev = np.real(spectrum.eigenvalues)
    values = np.atleast_1d(np.asarray(values, dtype=float))
    dists = np.abs(values[:, None] - ev[None, :]).min(axis=1)
    return {
        "max_dist": float(dists.max()) if len(values) else 0.0,
        "tol": tol,
        "passed": bool(len(values) == 0 or dists.max() <= tol),
        "per_value": [float(d) for d in dists],
    }
