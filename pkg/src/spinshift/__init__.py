"""Temperature-dependent transition frequencies of spin defects.

Post-processing of phonon spectra and finite-difference curvatures into
thermal-expansion and dynamical-phonon shifts, spin-Hamiltonian level
structure, and hyperfine / quadrupole / dipolar tensors from density grids.
"""

__version__ = "0.1.0"

from .constants import CONSTANTS, PhysicalConstants
from .phonons import PhononMode, PhononSpectrum, bose_occupation, mean_square_displacement
from .shift import (CurvatureSample, CurvatureSet, LatticeTable, ShiftCurve, dynamic_shift,
                    expansion_shift, modal_frequency_shift, second_derivative,
                    temperature_derivative, total_shift_curve, zpl_shift)
from .oracle import OccupationEnsemble, oracle_average
from .spin import (InteractionTensor, Nucleus, SpinSystem, build_full_hamiltonian, build_reduced,
                   c13_hyperfine_frequency, diagonalize, group_equivalent_nuclei,
                   principal_axis_forms, spin_operators, transition_frequency)
from .tensors import (NucleusSpec, ScalarField, dipolar_coupling_direct, dipolar_hyperfine,
                      efg_tensor, fermi_contact, q_matrix)
from .spectral import SpectralDensity, correlation_overlay, shift_ratio, spectral_density
