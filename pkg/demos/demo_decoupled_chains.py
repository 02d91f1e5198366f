"""The weak-coupling structure: two chains plus an exponentially small bridge.

At large theta the local Hamiltonian falls apart into two next-nearest
neighbour XXZ chains whose hops carry occupation phases from the site in
between.  A diagonal phase rotation strips those phases in the bulk and
leaves twisted wrap bonds, so the spectrum is a union of twisted
single-chain spectra over the sublattice fillings.  The residual
inter-chain coupling starts at order exp(-theta) with the uniform hop
amplitude 2 sin(eta)^2 on configurations whose outer neighbours match.
"""

import numpy as np

from sgvertex import (
    ModelParams,
    decoupled_chains,
    decoupled_spectrum_union,
    decoupling_transform,
    hamiltonian_h0,
    hamiltonian_local,
    interaction_first_order,
)

eta = 2 * np.pi / 5

print("=== approach to the decoupled point, L=6 ===")
h0 = hamiltonian_h0(ModelParams(eta=eta, theta=1.0, L=6, M=3))
for theta in (6.0, 8.0, 10.0, 12.0):
    h = hamiltonian_local(ModelParams(eta=eta, theta=theta, L=6, M=3))
    r = np.linalg.norm(h.matrix - h0.matrix) / np.linalg.norm(h0.matrix)
    print(f"  theta={theta:5.1f}: |H - H0|/|H0| = {r:.3e}   (exp(-theta) = {np.exp(-theta):.3e})")

print("\n=== phase-string rotation, L=8, M=4 ===")
p = ModelParams(eta=eta, theta=1.0, L=8, M=4)
h0 = hamiltonian_h0(p)
u = decoupling_transform(p)
conj = u.matrix.conj().T @ h0.matrix @ u.matrix
print("  |U^dag H0 U - twisted chains| =",
      f"{np.linalg.norm(conj - decoupled_chains(p).matrix):.3e}")

ev = np.sort(np.linalg.eigvalsh(h0.matrix))
union = decoupled_spectrum_union(p)
print("  spectrum vs twisted-chain union:", f"{np.max(np.abs(ev - union)):.3e}")
print("  lowest five levels:", np.round(ev[:5], 6))

print("\n=== leading inter-chain coupling, L=6, theta=2 ===")
v = interaction_first_order(ModelParams(eta=eta, theta=2.0, L=6, M=3))
nz = np.abs(v.matrix[np.abs(v.matrix) > 1e-15])
print(f"  {nz.size} nonzero entries, all of size {nz.min():.6f}"
      f" = 2 sin(eta)^2 e^(-theta) = {2*np.sin(eta)**2*np.exp(-2.0):.6f}")
