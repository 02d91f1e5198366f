"""Local Hamiltonians of the alternating chain and their limits.

Two independent constructions of the same operator are provided:

* ``hamiltonian_logderiv`` evaluates (sinh(i eta)/2) (Z^-1(0) Z'(0)
  + Z^-1(theta) Z'(theta)) from the transfer matrices directly; this is
  the defining form and serves as ground truth.
* ``hamiltonian_local`` assembles the equivalent sum of three-site terms
  S^-1_{i+1,i+2} P_{i,i+2} S'_{i,i+2} S_{i+1,i+2}
  + sinh(i eta) S^-1_{i+1,i+2} S'_{i+1,i+2}, with the vertex argument on
  the (i+1, i+2) legs fixed to xi_i - xi_{i+1} (so -theta when site i
  carries shift 0 and +theta when it carries theta) and the derivative
  factor on (i, i+2) taken at argument 0.

The two agree up to one overall real scale and a multiple of the
identity; ``reconcile`` fits and reports that pair.  The local sum as
written equals exactly twice the log-derivative form (scale 2, shift 0),
which the reconciliation records rather than assumes.

``hamiltonian_h0`` is the exact theta -> infinity limit of the local sum:
two next-nearest-neighbour XXZ chains coupled only through occupation
phases on the intermediate site.  ``decoupling_transform`` builds the
diagonal phase rotation that removes those phases in the bulk, trading
them for a total-number twist on the wrap bonds.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .basis import SectorBasis, SectorOperator
from .errors import ConventionMismatchError, ReconciliationError, SingularTransferMatrixError
from .params import ModelParams
from .smatrix import PERMUTATION_4, s_matrix, s_matrix_derivative
from .transfer import transfer_matrix, transfer_matrix_derivative

COND_LIMIT = 1e12
HERMITICITY_TOL = 1e-8


# ---------------------------------------------------------------------------
# log-derivative construction


def hamiltonian_logderiv(
    params: ModelParams,
    M: int | None = None,
    check_hermiticity: bool = True,
) -> SectorOperator:
    """H = (sinh(i eta)/2) (Z^-1(0) Z'(0) + Z^-1(theta) Z'(theta)) on the sector.

    Raises SingularTransferMatrixError when either transfer matrix has a
    condition number above 1e12, and ConventionMismatchError when the
    hermiticity residual exceeds 1e-8 (pass check_hermiticity=False to
    keep the operator as-is and inspect the residual instead).
    """
    M = params.M if M is None else M
    c0 = cmath.sinh(1j * params.eta)
    parts = []
    for point in (0.0, params.theta):
        z = transfer_matrix(point, params, M)
        zdot = transfer_matrix_derivative(point, params, M)
        cond = np.linalg.cond(z.matrix)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise SingularTransferMatrixError(
                f"cond(Z({point})) = {cond:.3e} exceeds {COND_LIMIT:.0e}"
            )
        parts.append(np.linalg.solve(z.matrix, zdot.matrix))
    h = 0.5 * c0 * (parts[0] + parts[1])
    op = SectorOperator(SectorBasis.build(params.L, M), h)
    if check_hermiticity and op.hermiticity_residual() > HERMITICITY_TOL:
        raise ConventionMismatchError(
            f"hermiticity residual {op.hermiticity_residual():.3e} above {HERMITICITY_TOL:.0e}"
        )
    return op


# ---------------------------------------------------------------------------
# local three-site construction


def _embed_three(op4: np.ndarray, slots: tuple[int, int, int] | tuple[int, int]) -> np.ndarray:
    """Embed a 4x4 pair operator into the 8-dim space of a site triple.

    slots gives the two triple positions (0, 1 or 2) the operator acts on,
    first position = first tensor slot of the 4x4 matrix.  Triple
    configurations are indexed by bit0 + 2*bit1 + 4*bit2.
    """
    p, q = slots
    out = np.zeros((8, 8), dtype=complex)
    for col in range(8):
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


def _local_term(eta: float, arg: float) -> np.ndarray:
    """8x8 matrix of one three-site term, sites ordered (i, i+1, i+2)."""
    s23 = _embed_three(s_matrix(arg, eta), (1, 2))
    s23_dot = _embed_three(s_matrix_derivative(arg, eta), (1, 2))
    s13_dot = _embed_three(s_matrix_derivative(0.0, eta), (0, 2))
    p13 = _embed_three(PERMUTATION_4, (0, 2))
    s23_inv = np.linalg.inv(s23)
    c0 = cmath.sinh(1j * eta)
    return s23_inv @ p13 @ s13_dot @ s23 + c0 * (s23_inv @ s23_dot)


def _scatter_three_site(
    basis: SectorBasis, term: np.ndarray, sites: tuple[int, int, int], out: np.ndarray
) -> None:
    """Accumulate a three-site term into the dense sector matrix."""
    i0, i1, i2 = sites
    L = basis.L
    for k, state in enumerate(basis.states):
        cin = ((state >> i0) & 1) | (((state >> i1) & 1) << 1) | (((state >> i2) & 1) << 2)
        rest = state & ~((1 << i0) | (1 << i1) | (1 << i2))
        for cout in range(8):
            w = term[cout, cin]
            if w == 0:
                continue
            new = rest | ((cout & 1) << i0) | (((cout >> 1) & 1) << i1) | (((cout >> 2) & 1) << i2)
            row = basis.index.get(new)
            if row is not None:
                out[row, k] += w


def hamiltonian_local(params: ModelParams, M: int | None = None) -> SectorOperator:
    """Sum of periodic three-site terms equivalent to the log-derivative form."""
    M = params.M if M is None else M
    basis = SectorBasis.build(params.L, M)
    xi = params.inhomogeneities()
    L = params.L
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    # two distinct local matrices, one per sublattice of the leading site
    terms = {}
    for i in range(L):
        arg = xi[i] - xi[(i + 1) % L]
        if arg not in terms:
            terms[arg] = _local_term(params.eta, arg)
        _scatter_three_site(basis, terms[arg], (i, (i + 1) % L, (i + 2) % L), mat)
    return SectorOperator(basis, mat)


def reconcile(
    local: SectorOperator, logderiv: SectorOperator, tol: float = 1e-9
) -> tuple[float, float, float]:
    """Fit (sigma, shift) minimising ||local - sigma*logderiv - shift*I||_F.

    Returns (sigma, shift, residual).  Raises ReconciliationError when the
    residual exceeds tol.
    """
    a, b = local.matrix, logderiv.matrix
    d = a.shape[0]
    eye = np.eye(d)
    # real least squares in (sigma, shift)
    g = np.array(
        [
            [np.vdot(b, b).real, np.trace(b).real],
            [np.trace(b).real, float(d)],
        ]
    )
    rhs = np.array([np.vdot(b, a).real, np.trace(a).real])
    sigma, shift = np.linalg.solve(g, rhs)
    residual = float(np.linalg.norm(a - sigma * b - shift * eye))
    if residual > tol:
        raise ReconciliationError(
            f"no affine map matches the two constructions: residual {residual:.3e}"
        )
    return float(sigma), float(shift), residual


# ---------------------------------------------------------------------------
# decoupled limit, phase-string rotation, first-order interaction


def _chain_sites(L: int) -> tuple[list[int], list[int]]:
    """Lattice sites of the two sublattice chains, in chain order."""
    odd_chain = [2 * x for x in range(L // 2)]      # sites carrying shift 0
    even_chain = [2 * x + 1 for x in range(L // 2)]  # sites carrying shift theta
    return odd_chain, even_chain


def hamiltonian_h0(params: ModelParams, M: int | None = None) -> SectorOperator:
    """Exact theta -> infinity limit of hamiltonian_local.

    Per leading site i (periodic): Delta * (n_i n_{i+2} + (1-n_i)(1-n_{i+2}))
    plus the next-nearest hop b_i^+ b_{i+2} dressed by exp(-+ 2i eta
    (n_{i+1} - 1/2)), the upper sign on the shift-0 sublattice.  Both
    sublattice particle numbers are conserved.
    """
    M = params.M if M is None else M
    basis = SectorBasis.build(params.L, M)
    L, eta, delta = params.L, params.eta, params.delta
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for k, state in enumerate(basis.states):
        diag = 0.0
        for i in range(L):
            j = (i + 2) % L
            ni, nj = (state >> i) & 1, (state >> j) & 1
            if ni == nj:
                diag += delta
            # hop j -> i with the phase set by the intermediate site
            if nj == 1 and ni == 0:
                mid = (i + 1) % L
                nmid = (state >> mid) & 1
                sign = -1.0 if i % 2 == 0 else 1.0
                phase = cmath.exp(sign * 2j * eta * (nmid - 0.5))
                new = (state & ~(1 << j)) | (1 << i)
                row = basis.index[new]
                mat[row, k] += phase
                mat[k, row] += phase.conjugate()
        mat[k, k] += diag
    return SectorOperator(basis, mat)


def interaction_first_order(params: ModelParams, M: int | None = None) -> SectorOperator:
    """Leading inter-chain coupling: every nearest-neighbour hop with
    uniform amplitude 2 sin(eta)^2 exp(-theta), periodic."""
    M = params.M if M is None else M
    basis = SectorBasis.build(params.L, M)
    amp = 2.0 * math.sin(params.eta) ** 2 * math.exp(-params.theta)
    L = params.L
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for k, state in enumerate(basis.states):
        for i in range(L):
            j = (i + 1) % L
            if (state >> j) & 1 and not (state >> i) & 1:
                new = (state & ~(1 << j)) | (1 << i)
                row = basis.index[new]
                mat[row, k] += amp
                mat[k, row] += amp
    return SectorOperator(basis, mat)


def decoupling_transform(params: ModelParams, M: int | None = None) -> SectorOperator:
    """Diagonal unimodular rotation removing the bulk inter-chain phases of H0.

    The phase of a configuration couples every shift-0 chain site x to the
    shift-theta sites strictly to its left:
        Phi = 2 eta * sum_{x > y} (n1_x - 1/2)(n2_y - 1/2).
    Conjugating H0 as U^dagger H0 U leaves two plain XXZ chains in the
    bulk; the wrap bonds keep a twist set by the other chain's filling.
    """
    M = params.M if M is None else M
    basis = SectorBasis.build(params.L, M)
    odd_chain, even_chain = _chain_sites(params.L)
    Lc = params.L // 2
    phases = np.zeros(basis.dim, dtype=complex)
    for k, state in enumerate(basis.states):
        n1 = [(state >> s) & 1 for s in odd_chain]
        n2 = [(state >> s) & 1 for s in even_chain]
        phi = 0.0
        for x in range(Lc):
            if x == 0:
                continue
            acc = sum(n2[y] - 0.5 for y in range(x))
            phi += (n1[x] - 0.5) * acc
        phases[k] = cmath.exp(2j * params.eta * phi)
    return SectorOperator(basis, np.diag(phases))


def decoupled_chains(params: ModelParams, M: int | None = None) -> SectorOperator:
    """Two independent XXZ chains with number-operator twists on the wrap.

    Built directly in the lattice basis: bulk bonds of each sublattice get
    hop + Delta*(nn + hh); the wrap hop of the shift-0 chain carries
    exp(-2i eta (N2 - L/4)) and the shift-theta chain exp(+2i eta
    (N1 - L/4)), with N1, N2 the sublattice particle numbers.  Equals
    U^dagger H0 U exactly.
    """
    M = params.M if M is None else M
    basis = SectorBasis.build(params.L, M)
    odd_chain, even_chain = _chain_sites(params.L)
    Lc = params.L // 2
    delta, eta, L = params.delta, params.eta, params.L
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for k, state in enumerate(basis.states):
        n1 = [(state >> s) & 1 for s in odd_chain]
        n2 = [(state >> s) & 1 for s in even_chain]
        diag = 0.0
        for chain, occ, other_count, twist_sign in (
            (odd_chain, n1, sum(n2), -1.0),
            (even_chain, n2, sum(n1), +1.0),
        ):
            for x in range(Lc):
                y = (x + 1) % Lc
                if occ[x] == occ[y]:
                    diag += delta
                si, sj = chain[x], chain[y]
                # hop y -> x on this chain; the wrap hop carries the twist
                if occ[y] == 1 and occ[x] == 0:
                    if y == 0:
                        amp = cmath.exp(1j * twist_sign * 2.0 * eta * (other_count - L / 4.0))
                    else:
                        amp = 1.0 + 0.0j
                    new = (state & ~(1 << sj)) | (1 << si)
                    row = basis.index[new]
                    mat[row, k] += amp
                    mat[k, row] += amp.conjugate()
        mat[k, k] += diag
    return SectorOperator(basis, mat)


def twisted_xxz_chain(Lc: int, N: int, delta: float, twist: float) -> np.ndarray:
    """Dense XXZ chain on Lc sites, N particles, twisted wrap bond.

    Bond term: b_x^+ b_{x+1} + h.c. + delta * (n n + (1-n)(1-n)); the wrap
    hop b_{Lc-1}^+ b_0 carries exp(1j * twist).
    """
    from itertools import combinations

    states = sorted(sum(1 << p for p in pos) for pos in combinations(range(Lc), N))
    index = {s: i for i, s in enumerate(states)}
    dim = len(states)
    mat = np.zeros((dim, dim), dtype=complex)
    for k, state in enumerate(states):
        diag = 0.0
        for x in range(Lc):
            y = (x + 1) % Lc
            nx, ny = (state >> x) & 1, (state >> y) & 1
            if nx == ny:
                diag += delta
            if ny == 1 and nx == 0:
                amp = cmath.exp(1j * twist) if y == 0 else 1.0 + 0.0j
                new = (state & ~(1 << y)) | (1 << x)
                row = index[new]
                mat[row, k] += amp
                mat[k, row] += amp.conjugate()
        mat[k, k] += diag
    return mat


def decoupled_spectrum_union(params: ModelParams, M: int | None = None) -> np.ndarray:
    """All H0 eigenvalues predicted from twisted single-chain spectra.

    For each sublattice split (N1, N2 = M - N1) the shift-0 chain is an
    XXZ chain with twist -2 eta (N2 - L/4) and the shift-theta chain one
    with twist +2 eta (N1 - L/4); the sector spectrum is the sum set.
    """
    M = params.M if M is None else M
    Lc = params.L // 2
    out = []
    for n1 in range(max(0, M - Lc), min(Lc, M) + 1):
        n2 = M - n1
        t1 = -2.0 * params.eta * (n2 - params.L / 4.0)
        t2 = +2.0 * params.eta * (n1 - params.L / 4.0)
        e1 = np.linalg.eigvalsh(twisted_xxz_chain(Lc, n1, params.delta, t1))
        e2 = np.linalg.eigvalsh(twisted_xxz_chain(Lc, n2, params.delta, t2))
        out.extend((e1[:, None] + e2[None, :]).ravel())
    return np.sort(np.asarray(out))


def sublattice_number_commutators(h0: SectorOperator) -> tuple[float, float]:
    """Commutator norms of H0 with the two sublattice particle numbers."""
    basis = h0.basis
    odd_chain, even_chain = _chain_sites(basis.L)
    n_odd = np.array([sum((s >> i) & 1 for i in odd_chain) for s in basis.states], dtype=float)
    n_even = np.array([sum((s >> i) & 1 for i in even_chain) for s in basis.states], dtype=float)
    a = h0.matrix
    c1 = np.linalg.norm(a * n_odd[None, :] - n_odd[:, None] * a)
    c2 = np.linalg.norm(a * n_even[None, :] - n_even[:, None] * a)
    return float(c1), float(c2)
