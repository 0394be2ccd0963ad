"""
Temperature shift of a spin transition
======================================

Builds the synthetic NV-like inputs, then splits the shift of D into the
thermal-expansion part and the dynamical-phonon part.
"""

import numpy as np

from spinshift.fixtures import NU_OF_A_SLOPES, diamond_like_lattice, nu_of_a_samples, \
    nv_like_curvatures, nv_like_spectrum
from spinshift.shift import total_shift_curve

# a 48-mode spectrum plus three zero-frequency translations
spectrum = nv_like_spectrum()
modes, n_soft = spectrum.admitted()
print(f"{len(modes)} modes admitted, {n_soft} soft modes dropped")

# curvature sets carry d2nu/dq^2 per mode
curv = nv_like_curvatures(spectrum)["D"]
lattice = diamond_like_lattice()
nu_a = nu_of_a_samples(curv.nu_zero, NU_OF_A_SLOPES["D"])

curve = total_shift_curve(spectrum, curv, lattice, nu_a, T_grid=np.arange(0.0, 501.0, 2.0))

for T in (100.0, 200.0, 300.0, 400.0):
    i = int(np.flatnonzero(curve.temperatures == T)[0])
    print(f"T = {T:5.0f} K  total {curve.total[i]: .5f} MHz  "
          f"(expansion {curve.expansion_term[i]: .5f}, dynamic {curve.dynamic_term[i]: .5f})  "
          f"dD/dT {curve.derivative[i]: .3f} kHz/K")

# the dynamic term dominates at room temperature
i300 = int(np.flatnonzero(curve.temperatures == 300.0)[0])
print("dynamic / total at 300 K:", curve.dynamic_term[i300] / curve.total[i300])
