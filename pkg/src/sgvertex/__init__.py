"""Six-vertex chain with alternating inhomogeneities.

Exact finite-lattice operators, sector diagonalization, Bethe-equation
solving, continuum observables and power-law scaling fits for the
integrable two-sublattice chain whose low-energy limit is a massive
relativistic field theory.
"""

__version__ = "0.1.0"

from .params import ModelParams
from .basis import SectorBasis, SectorOperator, sector_dimension
from .smatrix import s_matrix, s_matrix_derivative, yang_baxter_residual
from .transfer import transfer_matrix, transfer_matrix_derivative
from .hamiltonian import (
    decoupled_chains,
    decoupled_spectrum_union,
    decoupling_transform,
    hamiltonian_h0,
    hamiltonian_local,
    hamiltonian_logderiv,
    interaction_first_order,
    reconcile,
    twisted_xxz_chain,
)

__all__ = [
    "ModelParams",
    "SectorBasis",
    "SectorOperator",
    "sector_dimension",
    "s_matrix",
    "s_matrix_derivative",
    "yang_baxter_residual",
    "transfer_matrix",
    "transfer_matrix_derivative",
    "hamiltonian_logderiv",
    "hamiltonian_local",
    "hamiltonian_h0",
    "interaction_first_order",
    "decoupling_transform",
    "decoupled_chains",
    "decoupled_spectrum_union",
    "twisted_xxz_chain",
    "reconcile",
]
