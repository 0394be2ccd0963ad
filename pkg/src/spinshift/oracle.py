"""Brute-force Boltzmann average of a transition frequency over phonon occupations.

Every occupation vector ``{n_i}`` with ``n_i <= n_max_i`` is enumerated
explicitly; no per-mode factorization is used, so the result is an
independent check of the closed-form thermal sums in :mod:`spinshift.shift`.
"""

from dataclasses import dataclass
import math

import numpy as np

from .constants import CONSTANTS, RAD_S_TO_MHZ

MAX_MODES = 6
MAX_CONFIGURATIONS = 10**7
DEFAULT_TAIL = 1e-14
DEFAULT_NMAX_CAP = 200


class OracleError(ValueError):
    pass


def tail_weight(omega, T, n_max):
    """Unnormalized Boltzmann weight ``sum_{n > n_max} exp(-n x)`` with ``x = hbar w / kT``."""
    if T == 0:
        return 0.0
    x = CONSTANTS.hbar * omega / (CONSTANTS.k_B * T)
    return math.exp(-x * (n_max + 1)) / -math.expm1(-x)


def default_n_max(omega, T, tail=DEFAULT_TAIL, cap=DEFAULT_NMAX_CAP):
    """Smallest ``n`` whose tail weight is below ``tail``, capped at ``cap``."""
    if T == 0:
        return 1
    x = CONSTANTS.hbar * omega / (CONSTANTS.k_B * T)
    # exp(-x (n+1)) / (1 - exp(-x)) < tail
    n = math.ceil((-math.log(tail) - math.log(-math.expm1(-x))) / x - 1.0)
    return int(min(max(n, 1), cap))


def _mean_n_error_bound(omega, T, n_max):
    """Upper bound on ``<n>_exact - <n>_truncated`` (non-negative)."""
    if T == 0:
        return 0.0
    x = CONSTANTS.hbar * omega / (CONSTANTS.k_B * T)
    p = math.exp(-x)
    N = n_max
    return p ** (N + 1) * ((N + 1) - N * p) / (1.0 - p)


@dataclass(frozen=True)
class OccupationEnsemble:
    """Modes as ``(omega, delta_omega)`` pairs, both in rad/s.

    ``n_max`` is an int applied to every mode, a per-mode sequence, or
    ``None`` for :func:`default_n_max`.
    """

    modes: tuple
    T: float
    n_max: object = None

    def __post_init__(self):
        modes = tuple((float(w), float(dw)) for w, dw in self.modes)
        if any(w <= 0 for w, _ in modes):
            raise OracleError("oracle modes need omega > 0")
        if self.T < 0:
            raise OracleError("temperature must be non-negative")
        object.__setattr__(self, "modes", modes)
        if self.n_max is None:
            n_max = tuple(default_n_max(w, self.T) for w, _ in modes)
        elif np.ndim(self.n_max) == 0:
            n_max = (int(self.n_max),) * len(modes)
        else:
            n_max = tuple(int(n) for n in self.n_max)
        if len(n_max) != len(modes):
            raise OracleError("n_max length does not match the number of modes")
        if any(n < 1 for n in n_max):
            raise OracleError("n_max must be at least 1")
        object.__setattr__(self, "n_max", n_max)

    @property
    def n_configurations(self):
        if self.T == 0:
            return 1
        return math.prod(n + 1 for n in self.n_max)

    @property
    def tail_weights(self):
        return tuple(tail_weight(w, self.T, n) for (w, _), n in zip(self.modes, self.n_max))


@dataclass(frozen=True)
class OracleResult:
    average: float  # MHz
    tail_bound: float  # MHz, bound on |exact - average|
    n_configurations: int
    partition_function: float  # relative to the ground configuration
    tail_weights: tuple


def oracle_average(ensemble, nu0=0.0):
    """Boltzmann-weighted mean of ``nu0 + sum_i dw_i/2pi (n_i + 1/2)`` in MHz.

    Configurations are enumerated lexicographically (last mode fastest) and
    weighted in log space relative to the ground configuration.
    """
    d = len(ensemble.modes)
    if d > MAX_MODES:
        raise OracleError(f"oracle refuses {d} modes (max {MAX_MODES})")
    dnu = np.array([dw * RAD_S_TO_MHZ for _, dw in ensemble.modes])
    if d == 0:
        return OracleResult(float(nu0), 0.0, 1, 1.0, ())
    if ensemble.T == 0:
        value = nu0 + math.fsum(0.5 * dnu)
        return OracleResult(float(value), 0.0, 1, 1.0, ensemble.tail_weights)
    count = ensemble.n_configurations
    if count > MAX_CONFIGURATIONS:
        raise OracleError(f"{count} configurations exceed the limit of {MAX_CONFIGURATIONS}")

    kT = CONSTANTS.k_B * ensemble.T
    x = [CONSTANTS.hbar * w / kT for w, _ in ensemble.modes]
    levels = [np.arange(n + 1, dtype=float) for n in ensemble.n_max]

    # Block over the first mode's occupation; within a block the remaining
    # modes are laid out by broadcasting (last mode fastest).
    rest_logw = np.zeros(())
    rest_nu = np.zeros(())
    for xi, dn, lv in zip(x[1:], dnu[1:], levels[1:]):
        rest_logw = rest_logw[..., None] - xi * lv
        rest_nu = rest_nu[..., None] + dn * (lv + 0.5)
    rest_logw = rest_logw.ravel()
    rest_nu = rest_nu.ravel()
    z_parts, s_parts = [], []
    for n0 in levels[0]:
        w = np.exp(rest_logw - x[0] * n0)
        nu = nu0 + dnu[0] * (n0 + 0.5) + rest_nu
        z_parts.append(w.sum())
        s_parts.append(np.dot(w, nu))
    Z = math.fsum(z_parts)
    average = math.fsum(s_parts) / Z

    bound = math.fsum(abs(dn) * _mean_n_error_bound(w, ensemble.T, n)
                      for dn, (w, _), n in zip(dnu, ensemble.modes, ensemble.n_max))
    return OracleResult(average, bound, count, float(Z), ensemble.tail_weights)


def ensemble_from_curvatures(spectrum, curvatures, T, n_max=None, omega_min_thz=0.1):
    """Oracle ensemble whose ``delta_omega`` values come from finite-difference curvatures."""
    from .shift import modal_frequency_shift

    modes, _ = spectrum.admitted(omega_min_thz)
    pairs = [(m.omega, modal_frequency_shift(m, curvatures.d2nu(m.index), omega_min_thz)) for m in modes]
    return OccupationEnsemble(tuple(pairs), T, n_max)
