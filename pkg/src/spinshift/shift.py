"""Temperature-dependent transition-frequency shifts.

Two contributions are evaluated on a temperature grid:

* the quasiharmonic thermal-expansion term, from a lattice-parameter table
  ``a(T)`` and the static dependence ``nu(a)``;
* the second-order dynamical-phonon term
  ``sum_i 1/2 d2nu_i hbar/(M_i omega_i) (n_i(T) + 1/2)``, with the curvatures
  ``d2nu_i`` obtained by central finite differences along each normal mode.

The zero-phonon-line variant replaces the curvature route by explicit
ground/excited-state phonon frequency differences.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import HBAR_OVER_AMU_A2, RAD_S_TO_MHZ
from .phonons import DEFAULT_OMEGA_MIN_THZ, PhononError, PhononSpectrum, bose_occupation

DEFAULT_DELTA_Q = 0.03  # Angstrom
DEFAULT_T_GRID = np.arange(0.0, 502.0, 2.0)

# Fixed chunk size keeps the work partition independent of the thread count.
_CHUNK = 64


class ShiftError(ValueError):
    pass


class MissingModeError(ShiftError):
    pass


class ExtrapolationError(ShiftError):
    pass


@dataclass(frozen=True)
class CurvatureSample:
    mode_index: int
    delta_q: float
    nu_plus: float
    nu_minus: float
    nu_zero: float

    def __post_init__(self):
        if not self.delta_q > 0:
            raise ShiftError(f"mode {self.mode_index}: delta_q must be positive")


def second_derivative(sample):
    """Central finite difference ``[nu(+dq) + nu(-dq) - 2 nu(0)] / dq^2`` (MHz/A^2)."""
    if sample.delta_q == 0:
        raise ShiftError("delta_q must be nonzero")
    return (sample.nu_plus + sample.nu_minus - 2.0 * sample.nu_zero) / sample.delta_q**2


class CurvatureSet:
    """Finite-difference samples of one observable, one per phonon mode."""

    def __init__(self, observable, samples):
        self.observable = observable
        self.samples = tuple(samples)
        by_index = {}
        for s in self.samples:
            if s.mode_index in by_index:
                raise ShiftError(f"duplicate curvature sample for mode {s.mode_index}")
            by_index[s.mode_index] = s
        if self.samples:
            ref = self.samples[0].nu_zero
            scale = max(abs(ref), 1e-300)
            for s in self.samples:
                if abs(s.nu_zero - ref) > 1e-9 * scale:
                    raise ShiftError(
                        f"{observable}: nu_zero of mode {s.mode_index} differs from the set reference"
                    )
        self._by_index = by_index
        self._d2 = {i: second_derivative(s) for i, s in by_index.items()}

    @classmethod
    def from_second_derivatives(cls, observable, d2nu, nu_zero=0.0, delta_q=DEFAULT_DELTA_Q):
        """Build symmetric synthetic samples that reproduce the given curvatures.

        ``d2nu`` maps mode index to curvature in MHz/A^2.
        """
        samples = []
        for idx, d2 in d2nu.items():
            half = 0.5 * d2 * delta_q**2
            samples.append(CurvatureSample(int(idx), delta_q, nu_zero + half, nu_zero + half, nu_zero))
        return cls(observable, samples)

    @property
    def nu_zero(self):
        return self.samples[0].nu_zero if self.samples else 0.0

    @property
    def second_derivatives(self):
        return dict(self._d2)

    def __contains__(self, mode_index):
        return mode_index in self._d2

    def __len__(self):
        return len(self.samples)

    def d2nu(self, mode_index):
        try:
            return self._d2[mode_index]
        except KeyError:
            raise MissingModeError(f"{self.observable}: no curvature sample for mode {mode_index}") from None

    def scaled(self, factor, observable=None):
        return CurvatureSet.from_second_derivatives(
            observable or self.observable,
            {i: factor * d for i, d in self._d2.items()},
            self.nu_zero,
        )


def modal_frequency_shift(mode, d2nu, omega_min_thz=DEFAULT_OMEGA_MIN_THZ):
    """Modal frequency difference ``hbar/(2 M omega) * d^2(2 pi nu)/dq^2`` in rad/s."""
    if not mode.is_admitted(omega_min_thz):
        raise PhononError(f"mode {mode.index} is below the soft-mode cutoff")
    return HBAR_OVER_AMU_A2 / (2.0 * mode.effective_mass * mode.omega) * 2.0 * math.pi * d2nu * 1e6


def _column_fsum(rows):
    rows = np.atleast_2d(rows)
    if rows.shape[0] == 0:
        return np.zeros(rows.shape[1])
    return np.array([math.fsum(col) for col in rows.T])


def _mode_terms(modes, d2, T, zeta):
    """Rows of ``1/2 d2nu hbar/(M omega) (n + zeta)`` for a chunk of modes."""
    rows = np.empty((len(modes), T.size))
    for k, (mode, d) in enumerate(zip(modes, d2)):
        n = bose_occupation(mode.omega, T)
        rows[k] = 0.5 * d * (HBAR_OVER_AMU_A2 / (mode.effective_mass * mode.omega)) * (n + zeta)
    return rows


def _accumulate(modes, d2, T, zeta, threads):
    chunks = [(modes[i:i + _CHUNK], d2[i:i + _CHUNK]) for i in range(0, len(modes), _CHUNK)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _mode_terms(c[0], c[1], T, zeta), chunks))
    else:
        parts = [_mode_terms(m, d, T, zeta) for m, d in chunks]
    if not parts:
        return np.zeros(T.size)
    # fsum is correctly rounded, so the result does not depend on the partition.
    return _column_fsum(np.vstack(parts))


def dynamic_shift(spectrum, curvatures, T, subtract_zero_point=False,
                  omega_min_thz=DEFAULT_OMEGA_MIN_THZ, threads=1):
    """Second-order dynamical-phonon shift in MHz.

    Parameters
    ----------
    spectrum : PhononSpectrum
    curvatures : CurvatureSet
        Must cover every admitted mode of ``spectrum``.
    T : float or array
        Temperature(s) in K.
    subtract_zero_point : bool
        Drop the zero-point ``1/2`` so the shift vanishes at T = 0.
    """
    modes, _ = spectrum.admitted(omega_min_thz)
    d2 = [curvatures.d2nu(m.index) for m in modes]
    T_arr = np.atleast_1d(np.asarray(T, dtype=float))
    zeta = 0.0 if subtract_zero_point else 0.5
    out = _accumulate(modes, d2, T_arr, zeta, threads)
    return float(out[0]) if np.ndim(T) == 0 else out


class LatticeTable:
    """Lattice parameter ``a(T)`` (Angstrom) under monotone cubic interpolation."""

    def __init__(self, T, a):
        T = np.asarray(T, dtype=float)
        a = np.asarray(a, dtype=float)
        if T.ndim != 1 or T.shape != a.shape or T.size < 2:
            raise ShiftError("lattice table needs at least two (T, a) rows")
        if np.any(np.diff(T) <= 0):
            raise ShiftError("lattice table temperatures must be strictly increasing")
        if np.any(a <= 0):
            raise ShiftError("lattice parameters must be positive")
        self.T = T
        self.a_values = a
        self._interp = PchipInterpolator(T, a, extrapolate=True)
        self._deriv = self._interp.derivative()

    @property
    def t_range(self):
        return float(self.T[0]), float(self.T[-1])

    def check_range(self, T, allow_extrapolation=False):
        T = np.asarray(T, dtype=float)
        lo, hi = self.t_range
        if not allow_extrapolation and (np.any(T < lo) or np.any(T > hi)):
            raise ExtrapolationError(f"temperature outside lattice table range [{lo}, {hi}] K")

    def a(self, T, allow_extrapolation=False):
        self.check_range(T, allow_extrapolation)
        return self._interp(T)

    def dadT(self, T, allow_extrapolation=False):
        self.check_range(T, allow_extrapolation)
        return self._deriv(T)

    def alpha(self, T, allow_extrapolation=False):
        """Linear thermal expansion coefficient ``(1/a) da/dT`` in 1/K."""
        return self.dadT(T, allow_extrapolation) / self.a(T, allow_extrapolation)


def fit_nu_of_a(nu_of_a, degree=1):
    """Least-squares polynomial ``nu(a)`` from (a, nu) samples."""
    pts = np.asarray(nu_of_a, dtype=float).reshape(-1, 2)
    if pts.shape[0] < 2:
        raise ShiftError("need at least two (a, nu) samples")
    if pts.shape[0] <= degree:
        raise ShiftError(f"degree {degree} fit needs more than {degree} samples")
    return np.polynomial.Polynomial.fit(pts[:, 0], pts[:, 1], degree)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)


def _gauss_segment(f, lo, hi):
    if hi == lo:
        return 0.0
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return half * float(np.dot(_GL_W, f(mid + half * _GL_X)))


def _expansion_integral(lattice, poly, T, T_ref):
    dpoly = poly.deriv()

    def integrand(t):
        a = lattice._interp(t)
        return dpoly(a) * a * (lattice._deriv(t) / a)

    lo, hi = sorted((T_ref, T))
    # Each knot interval is a polynomial piece; 5-point Gauss-Legendre is exact there.
    knots = lattice.T[(lattice.T > lo) & (lattice.T < hi)]
    edges = np.concatenate([[lo], knots, [hi]])
    total = math.fsum(_gauss_segment(integrand, edges[k], edges[k + 1]) for k in range(edges.size - 1))
    return total if T >= T_ref else -total


def expansion_shift(lattice, nu_of_a, T, T_ref=0.0, degree=1, method="integral",
                    allow_extrapolation=False):
    """Thermal-expansion shift ``nu(T) - nu(T_ref)`` in MHz.

    ``method="integral"`` integrates ``(dnu/da) a(T) alpha(T)`` from ``T_ref``;
    ``method="direct"`` evaluates ``nu(a(T)) - nu(a(T_ref))``. The two agree
    to quadrature precision.
    """
    poly = fit_nu_of_a(nu_of_a, degree)
    T_arr = np.atleast_1d(np.asarray(T, dtype=float))
    lattice.check_range(np.append(T_arr, T_ref), allow_extrapolation)
    if method == "integral":
        out = np.array([_expansion_integral(lattice, poly, t, T_ref) for t in T_arr])
    elif method == "direct":
        ref = poly(lattice._interp(T_ref))
        out = poly(lattice._interp(T_arr)) - ref
    else:
        raise ShiftError(f"unknown method {method!r}")
    return float(out[0]) if np.ndim(T) == 0 else out


@dataclass(frozen=True)
class ShiftCurve:
    """Shift versus temperature with its per-term breakdown.

    ``total``, ``expansion_term`` and ``dynamic_term`` are in MHz,
    ``derivative`` (of the total) in kHz/K.
    """

    temperatures: np.ndarray
    total: np.ndarray
    expansion_term: np.ndarray
    dynamic_term: np.ndarray
    derivative: np.ndarray
    observable: str = ""

    @classmethod
    def from_terms(cls, temperatures, expansion_term, dynamic_term, observable=""):
        T = np.asarray(temperatures, dtype=float)
        exp = np.asarray(expansion_term, dtype=float)
        dyn = np.asarray(dynamic_term, dtype=float)
        total = exp + dyn
        deriv = _gradient_khz(T, total)
        return cls(T, total, exp, dyn, deriv, observable)

    def at(self, T):
        """Linear interpolation of (total, derivative) at ``T``."""
        return (float(np.interp(T, self.temperatures, self.total)),
                float(np.interp(T, self.temperatures, self.derivative)))


def _gradient_khz(T, values):
    if T.size < 3:
        raise ShiftError("temperature derivative needs at least 3 grid points")
    return np.gradient(values, T, edge_order=1) * 1e3


def temperature_derivative(curve):
    """d(total)/dT on the curve's grid in kHz/K (central differences, one-sided at the ends)."""
    return _gradient_khz(np.asarray(curve.temperatures, dtype=float), np.asarray(curve.total, dtype=float))


def total_shift_curve(spectrum, curvatures, lattice=None, nu_of_a=None, T_grid=None,
                      subtract_zero_point=True, omega_min_thz=DEFAULT_OMEGA_MIN_THZ,
                      threads=1, T_ref=0.0, degree=1, allow_extrapolation=False):
    T = DEFAULT_T_GRID if T_grid is None else np.asarray(T_grid, dtype=float)
    dyn = dynamic_shift(spectrum, curvatures, T, subtract_zero_point, omega_min_thz, threads)
    if lattice is not None and nu_of_a is not None:
        exp = expansion_shift(lattice, nu_of_a, T, T_ref, degree, allow_extrapolation=allow_extrapolation)
    else:
        exp = np.zeros_like(T)
    return ShiftCurve.from_terms(T, exp, dyn, curvatures.observable)


def zpl_shift(ground, excited, nu0_of_a=None, lattice=None, T_grid=None,
              subtract_zero_point=True, omega_min_thz=DEFAULT_OMEGA_MIN_THZ,
              T_ref=0.0, degree=1, allow_extrapolation=False):
    """Zero-phonon-line shift from ground/excited phonon spectra.

    Modes are matched by position. Occupations use the ground-state
    frequencies; each mode contributes ``(w_e - w_g)/2pi (n_g + 1/2)``.
    """
    if len(ground) != len(excited):
        raise ShiftError(f"mode-count mismatch: {len(ground)} ground vs {len(excited)} excited")
    T = DEFAULT_T_GRID if T_grid is None else np.asarray(T_grid, dtype=float)
    zeta = 0.0 if subtract_zero_point else 0.5
    rows = []
    for g, e in zip(ground.modes, excited.modes):
        if not g.is_admitted(omega_min_thz):
            continue
        dnu = (e.omega - g.omega) * RAD_S_TO_MHZ
        rows.append(dnu * (bose_occupation(g.omega, T) + zeta))
    dyn = _column_fsum(np.array(rows).reshape(len(rows), T.size))
    if lattice is not None and nu0_of_a is not None:
        exp = expansion_shift(lattice, nu0_of_a, T, T_ref, degree, allow_extrapolation=allow_extrapolation)
    else:
        exp = np.zeros_like(T)
    return ShiftCurve.from_terms(T, exp, dyn, "ZPL")
