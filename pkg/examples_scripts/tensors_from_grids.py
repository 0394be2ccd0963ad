"""
Coupling tensors from densities on a grid
=========================================

A Gaussian spin density gives a hyperfine tensor at nearby nuclei, point
charges give an EFG, and the EFG gives the quadrupole matrix of 14N.
13C sites are then grouped by hyperfine strength.
"""

import numpy as np

from spinshift.fixtures import c13_sites, gaussian_spin_grid
from spinshift.spin import c13_hyperfine_frequency, group_equivalent_nuclei
from spinshift.tensors import NucleusSpec, efg_principal_values, efg_tensor, hyperfine_tensor, q_matrix

rho = gaussian_spin_grid(center=(0.0, 0.0, 0.3))
print("spin density integral:", round(rho.integral(), 6))

c = NucleusSpec.isotope("13C", [0.9, 0.0, 0.6], label="C1")
A = hyperfine_tensor(rho, c, Sz_expect=1.0)
print("A(13C) [MHz]:\n", np.round(A, 4))

# EFG at the nitrogen from three carbon neighbours (no electron cloud)
n = NucleusSpec.isotope("14N", [0.0, 0.0, 0.0], label="N")
carbons = [NucleusSpec.isotope("12C", 1.5 * np.array([np.cos(p), np.sin(p), -0.35]))
           for p in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)]
V = efg_tensor(None, [n] + carbons, n)
Q = q_matrix(efg_principal_values(V), n)
print("EFG principal values [V/A^2]:", np.round(efg_principal_values(V), 4))
print("Q diag [MHz]:", np.round(np.diag(Q), 5), " trace:", np.trace(Q))

freqs = [(sid, c13_hyperfine_frequency(A)) for sid, A in c13_sites()]
for g in group_equivalent_nuclei(freqs, tol=1e-3):
    print(f"{len(g)} site(s) at {g[0][1]:.3f} MHz:", ", ".join(s for s, _ in g))
