"""Phonon modes, Bose-Einstein occupation and harmonic mean-square displacement."""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .constants import CONSTANTS, HBAR_OVER_AMU_A2, THZ_TO_RAD_S

DEFAULT_OMEGA_MIN_THZ = 0.1


class PhononError(ValueError):
    pass


@dataclass(frozen=True)
class PhononMode:
    """One vibrational mode.

    Parameters
    ----------
    index : int
        Mode id, unique within a spectrum.
    omega : float
        Angular frequency in rad/s. Zero or negative values are allowed on
        construction (soft/imaginary modes) but such modes are never admitted
        to thermal sums.
    effective_mass : float
        Mode effective mass in amu.
    displacement_pattern : array, optional
        Per-atom 3-vectors, normalized to unit Euclidean norm.
    """

    index: int
    omega: float
    effective_mass: float
    displacement_pattern: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if not np.isfinite(self.omega):
            raise PhononError(f"mode {self.index}: non-finite frequency")
        if not self.effective_mass > 0:
            raise PhononError(f"mode {self.index}: effective mass must be positive")
        if self.displacement_pattern is not None:
            pattern = np.asarray(self.displacement_pattern, dtype=float).reshape(-1, 3)
            if abs(np.linalg.norm(pattern) - 1.0) > 1e-8:
                raise PhononError(f"mode {self.index}: displacement pattern not normalized")
            object.__setattr__(self, "displacement_pattern", pattern)

    @classmethod
    def from_thz(cls, index, freq_thz, effective_mass, displacement_pattern=None):
        return cls(int(index), freq_thz * THZ_TO_RAD_S, effective_mass, displacement_pattern)

    @property
    def freq_thz(self):
        return self.omega / THZ_TO_RAD_S

    def is_admitted(self, omega_min_thz=DEFAULT_OMEGA_MIN_THZ):
        return self.omega > 0 and self.freq_thz >= omega_min_thz


@dataclass(frozen=True)
class PhononSpectrum:
    modes: tuple
    label: str = ""

    def __post_init__(self):
        modes = tuple(self.modes)
        indices = [m.index for m in modes]
        if len(set(indices)) != len(indices):
            raise PhononError("mode indices in a spectrum must be unique")
        object.__setattr__(self, "modes", modes)

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def admitted(self, omega_min_thz=DEFAULT_OMEGA_MIN_THZ):
        """Return ``(admitted_modes, n_excluded)``; admitted modes stay in input order."""
        kept = tuple(m for m in self.modes if m.is_admitted(omega_min_thz))
        return kept, len(self.modes) - len(kept)

    @property
    def omegas(self):
        return np.array([m.omega for m in self.modes])

    @property
    def masses(self):
        return np.array([m.effective_mass for m in self.modes])


def _reduced_energy(omega, T):
    return CONSTANTS.hbar * omega / (CONSTANTS.k_B * T)


def bose_occupation(omega, T):
    """Mean Bose-Einstein occupation ``1/(exp(hbar*omega/kT) - 1)``.

    Vectorizes over ``omega`` and ``T``. Returns exactly 0 at ``T == 0`` and
    underflows to 0 (not NaN) for very large ``hbar*omega/kT``.
    """
    omega = np.asarray(omega, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(omega <= 0):
        raise PhononError("bose_occupation requires omega > 0")
    if np.any(T < 0):
        raise PhononError("temperature must be non-negative")
    omega, T = np.broadcast_arrays(omega, T)
    out = np.zeros(omega.shape)
    hot = T > 0
    with np.errstate(over="ignore"):
        out[hot] = 1.0 / np.expm1(_reduced_energy(omega[hot], T[hot]))
    if out.ndim == 0:
        return float(out)
    return out


def zero_point_msd(mode):
    """hbar / (2 M omega) in Angstrom^2."""
    if mode.omega <= 0:
        raise PhononError(f"mode {mode.index}: omega must be positive")
    return HBAR_OVER_AMU_A2 / (2.0 * mode.effective_mass * mode.omega)


def mean_square_displacement(mode, T):
    """Thermal ``<q^2> = hbar/(M omega) (n + 1/2)`` in Angstrom^2."""
    n = bose_occupation(mode.omega, T)
    return HBAR_OVER_AMU_A2 / (mode.effective_mass * mode.omega) * (n + 0.5)


def spectrum_from_arrays(freqs_thz: Sequence[float], masses: Sequence[float], label="", start=0):
    """Convenience constructor from parallel arrays of THz frequencies and amu masses."""
    modes = [PhononMode.from_thz(start + i, f, m) for i, (f, m) in enumerate(zip(freqs_thz, masses))]
    return PhononSpectrum(tuple(modes), label)
