"""Curvature spectral densities, shift ratios and correlation overlays."""

from dataclasses import dataclass
import math

import numpy as np

from .phonons import DEFAULT_OMEGA_MIN_THZ, bose_occupation
from .shift import ShiftError

DEFAULT_BINS = 200


@dataclass(frozen=True)
class SpectralDensity:
    """Histogram of ``(1/M_j) d2nu/dq_j^2`` over mode frequency.

    The delta components (``mode_omegas``, ``mode_weights``) are kept next to
    the binned ``weights`` so that frequency integrals are exact rather than
    limited by the bin width.
    """

    bin_edges: np.ndarray  # rad/s
    weights: np.ndarray  # MHz / (A^2 amu) per bin
    observable: str
    mode_omegas: np.ndarray
    mode_weights: np.ndarray

    @property
    def bin_centers(self):
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def total_weight(self):
        return math.fsum(self.mode_weights)


def default_bins(spectrum, n_bins=DEFAULT_BINS, omega_min_thz=DEFAULT_OMEGA_MIN_THZ):
    modes, _ = spectrum.admitted(omega_min_thz)
    w_max = max(m.omega for m in modes)
    return np.linspace(0.0, 1.05 * w_max, n_bins + 1)


def spectral_density(spectrum, curvatures, bins=None, omega_min_thz=DEFAULT_OMEGA_MIN_THZ):
    """Accumulate per-mode weights ``d2nu_j / M_j`` into frequency bins.

    ``bins`` is an array of edges in rad/s, an int bin count, or ``None`` for
    200 uniform bins over ``[0, 1.05 max(omega)]``.
    """
    if bins is None or np.ndim(bins) == 0:
        edges = default_bins(spectrum, DEFAULT_BINS if bins is None else int(bins), omega_min_thz)
    else:
        edges = np.asarray(bins, dtype=float)
    modes, _ = spectrum.admitted(omega_min_thz)
    omegas = np.array([m.omega for m in modes])
    mw = np.array([curvatures.d2nu(m.index) / m.effective_mass for m in modes])
    if omegas.size and (omegas.min() < edges[0] or omegas.max() > edges[-1]):
        raise ShiftError("spectral bins do not cover the phonon spectrum")
    idx = np.clip(np.searchsorted(edges, omegas, side="right") - 1, 0, edges.size - 2)
    weights = np.zeros(edges.size - 1)
    for k, w in zip(idx, mw):
        weights[k] += w
    return SpectralDensity(edges, weights, curvatures.observable, omegas, mw)


def _weighted_integral(S, T, zeta):
    n = bose_occupation(S.mode_omegas, T) if S.mode_omegas.size else np.zeros(0)
    return math.fsum(S.mode_weights * (np.asarray(n) + zeta) / S.mode_omegas)


def shift_ratio(S1, S2, T, zeta=0.0):
    """Ratio ``int S1 w/omega / int S2 w/omega`` with ``w = n_Bose(omega, T) + zeta``.

    ``zeta = 0`` compares zero-point-subtracted shifts; ``zeta = 1/2`` compares
    absolute ones.
    """
    if not np.array_equal(S1.bin_edges, S2.bin_edges):
        raise ShiftError("spectral densities must share one bin grid")
    if zeta not in (0.0, 0.5):
        raise ShiftError("zeta must be 0 or 1/2")
    T_arr = np.atleast_1d(np.asarray(T, dtype=float))
    out = np.empty(T_arr.size)
    for k, t in enumerate(T_arr):
        den = _weighted_integral(S2, t, zeta)
        if den == 0:
            raise ZeroDivisionError(f"denominator integral vanishes at T = {t} K")
        out[k] = _weighted_integral(S1, t, zeta) / den
    return float(out[0]) if np.ndim(T) == 0 else out


@dataclass(frozen=True)
class Overlay:
    temperatures: np.ndarray
    reference: np.ndarray
    shifts: tuple  # per curve
    slopes: tuple  # per curve, d(shift)/d(reference)
    labels: tuple


def correlation_overlay(curves, reference=0):
    """Pair each curve's total shift with the reference curve and its local slope.

    The slope is the ratio of temperature derivatives; it is NaN where the
    reference derivative vanishes.
    """
    T = curves[reference].temperatures
    for c in curves:
        if not np.array_equal(c.temperatures, T):
            raise ShiftError("curves must share one temperature grid")
    ref = curves[reference].total
    dref = np.gradient(ref, T, edge_order=1)
    shifts, slopes = [], []
    for c in curves:
        d = np.gradient(c.total, T, edge_order=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = np.where(dref != 0, d / np.where(dref != 0, dref, 1.0), np.nan)
        shifts.append(c.total)
        slopes.append(slope)
    return Overlay(T, ref, tuple(shifts), tuple(slopes), tuple(c.observable for c in curves))
