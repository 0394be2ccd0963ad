"""Physical constants and the unit conversions used throughout the package.

Internal unit system: lengths in Angstrom, masses in amu, phonon frequencies
as angular frequencies in rad/s (input as linear THz), transition
frequencies in MHz and energies in eV.
"""

from dataclasses import dataclass
import math

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values (as shipped with scipy). Instances are immutable."""

    hbar: float = _sc.hbar / _sc.e  # eV s
    k_B: float = _sc.k / _sc.e  # eV/K
    mu_0: float = _sc.mu_0  # T m / A
    mu_B: float = _sc.physical_constants["Bohr magneton"][0]  # J/T
    mu_N: float = _sc.physical_constants["nuclear magneton"][0]  # J/T
    g_e: float = -_sc.physical_constants["electron g factor"][0]  # positive convention
    e: float = _sc.e  # C
    eps_0: float = _sc.epsilon_0  # F/m
    h: float = _sc.h  # J s
    amu: float = _sc.atomic_mass  # kg


CONSTANTS = PhysicalConstants()

# hbar / (amu * rad/s) expressed in Angstrom^2
HBAR_OVER_AMU_A2 = _sc.hbar / _sc.atomic_mass * 1e20

THZ_TO_RAD_S = 2.0 * math.pi * 1e12
RAD_S_TO_MHZ = 1.0 / (2.0 * math.pi * 1e6)

# e / (4 pi eps_0) in V Angstrom
COULOMB_V_A = _sc.e / (4.0 * math.pi * _sc.epsilon_0) * 1e10

# MHz per (mb * V/Angstrom^2): e * Q [C m^2] * V [V/m^2] / h, in MHz
EQ_MB_V_A2_TO_MHZ = _sc.e * 1e-31 * 1e20 / _sc.h * 1e-6

# mu_0 g_e^2 mu_B^2 / (4 pi h) in MHz Angstrom^3
DIPOLAR_MHZ_A3 = (
    CONSTANTS.mu_0 * CONSTANTS.g_e**2 * CONSTANTS.mu_B**2
    / (4.0 * math.pi * _sc.h) * 1e30 * 1e-6
)

# mu_0 g_e mu_B per Angstrom^3; times gamma_I/2pi in MHz/T gives MHz
HYPERFINE_MHZ_A3_PER_MHZ_T = CONSTANTS.mu_0 * CONSTANTS.g_e * CONSTANTS.mu_B * 1e30


def thz_to_rad_s(freq_thz):
    return freq_thz * THZ_TO_RAD_S


def rad_s_to_thz(omega):
    return omega / THZ_TO_RAD_S


def rad_s_to_mhz(omega):
    return omega * RAD_S_TO_MHZ


def mhz_to_rad_s(nu):
    return nu / RAD_S_TO_MHZ
