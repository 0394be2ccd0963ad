"""
Shift ratios from curvature spectral densities
==============================================

Two observables whose curvature spectra differ in shape have a
temperature-dependent shift ratio; proportional spectra give a constant.
"""

import numpy as np

from spinshift.fixtures import nv_like_curvatures, nv_like_spectrum
from spinshift.shift import total_shift_curve
from spinshift.spectral import correlation_overlay, default_bins, shift_ratio, spectral_density

sp = nv_like_spectrum()
curv = nv_like_curvatures(sp)
bins = default_bins(sp)
S = {k: spectral_density(sp, cs, bins) for k, cs in curv.items()}

T = np.array([50.0, 100.0, 200.0, 300.0, 500.0])
print("Q/D  :", np.round(shift_ratio(S["Q"], S["D"], T), 6))
print("Azz/D:", np.round(shift_ratio(S["Azz"], S["D"], T), 6))

curves = [total_shift_curve(sp, curv[k]) for k in ("D", "Azz")]
ov = correlation_overlay(curves)
i = int(np.flatnonzero(ov.temperatures == 300.0)[0])
print("dAzz/dD at 300 K:", ov.slopes[1][i])
