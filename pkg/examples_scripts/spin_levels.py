"""
NV-like electron-nuclear spin levels
====================================

Full 9x9 Hamiltonian for S = 1 and a 14N nucleus, its labelled levels, and
the principal-axis parameters recovered from the tensors.
"""

import numpy as np

from spinshift.fixtures import nv_tensors
from spinshift.spin import (Nucleus, SpinSystem, build_full_hamiltonian, build_reduced, diagonalize,
                            principal_axis_forms, transition_frequency)

Dt, At, Qt = nv_tensors()
system = SpinSystem(1, Dt, (Nucleus(1, At, Qt, "14N"),))
levels = diagonalize(build_full_hamiltonian(system), system)

# |+1,-1> and |-1,+1> are degenerate at zeroth order and mix through |0,0>
# via A_perp, so both come out half-and-half (weight 0.5, no unique label).
for E, lab, w in zip(levels.energies, levels.labels, levels.weights):
    print(f"{E:12.6f} MHz   |mS={lab[0]:+.0f}, mI={lab[1]:+.0f}>  weight {w:.6f}")

pa = principal_axis_forms(Dt, Qt)
print(f"D = {pa.D:.3f} MHz, eps = {pa.epsilon:.2e}, Q = {pa.Q:.3f} MHz, eta = {pa.eta:.2e}")

# A_perp mixes states at second order, so the reduced model is only close
red = build_reduced(pa.D, pa.Q, At.matrix[2, 2])
full = transition_frequency(levels, (0, 0), (-1, 0))
print(f"0 -> -1 (mI = 0): full {full:.6f} MHz, reduced {red[(-1, 0)] - red[(0, 0)]:.6f} MHz")
