"""Hyperfine, electric-field-gradient, quadrupole and spin-dipolar tensors from
densities on real-space grids.

Densities are number densities per Angstrom^3 (spin density for hyperfine
and dipolar terms, electron density for the EFG). Singular kernels are summed
voxel by voxel with an exclusion sphere of radius ``r_c`` around the origin
of the kernel.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.ndimage import map_coordinates

from .constants import COULOMB_V_A, DIPOLAR_MHZ_A3, EQ_MB_V_A2_TO_MHZ, HYPERFINE_MHZ_A3_PER_MHZ_T

DEFAULT_EXCLUSION_RADIUS = 0.05  # Angstrom
MAX_VOXEL_PAIRS = 10**7


class TensorError(ValueError):
    pass


class GridMismatchError(TensorError):
    pass


class ScalarField:
    """Values on a (possibly skewed) regular grid.

    ``spacing`` holds the three voxel step vectors as rows; the point with
    integer index ``(i, j, k)`` sits at ``origin + i*s0 + j*s1 + k*s2``.
    ``values`` may be a flat x-fastest array or an array of shape ``dims``
    indexed ``[i, j, k]``.
    """

    def __init__(self, origin, spacing, dims, values):
        self.origin = np.asarray(origin, dtype=float).reshape(3)
        self.spacing = np.asarray(spacing, dtype=float).reshape(3, 3)
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise TensorError("grid dims must be three positive integers")
        self.voxel_volume = abs(float(np.linalg.det(self.spacing)))
        if not self.voxel_volume > 0:
            raise TensorError("grid spacing vectors are linearly dependent")
        v = np.asarray(values, dtype=float)
        if v.ndim == 1:
            if v.size != math.prod(self.dims):
                raise TensorError(f"expected {math.prod(self.dims)} grid values, got {v.size}")
            v = v.reshape(self.dims, order="F")
        elif v.shape != self.dims:
            raise TensorError("grid values do not match dims")
        self.values = v

    @classmethod
    def from_function(cls, func, origin, spacing, dims):
        f = cls(origin, spacing, dims, np.zeros(dims))
        f.values = np.asarray(func(f.positions()), dtype=float).reshape(f.dims)
        return f

    def positions(self):
        """Cartesian positions, shape ``dims + (3,)``."""
        idx = np.stack(np.meshgrid(*[np.arange(d, dtype=float) for d in self.dims], indexing="ij"), axis=-1)
        return self.origin + idx @ self.spacing

    def flat_values(self):
        return self.values.ravel(order="F")

    def same_grid(self, other):
        return (self.dims == other.dims and np.allclose(self.origin, other.origin, rtol=0, atol=1e-12)
                and np.allclose(self.spacing, other.spacing, rtol=0, atol=1e-12))

    def fractional_index(self, point):
        return np.linalg.solve(self.spacing.T, np.asarray(point, dtype=float) - self.origin)

    def contains(self, point):
        f = self.fractional_index(point)
        return bool(np.all(f >= -1e-12) and np.all(f <= np.array(self.dims) - 1 + 1e-12))

    def interpolate(self, point):
        """Trilinear interpolation at a Cartesian point inside the grid."""
        if not self.contains(point):
            raise TensorError(f"point {tuple(np.round(point, 6))} lies outside the grid")
        f = np.clip(self.fractional_index(point), 0, np.array(self.dims) - 1)
        return float(map_coordinates(self.values, f.reshape(3, 1), order=1, mode="nearest")[0])

    def integral(self):
        return float(self.values.sum() * self.voxel_volume)


@dataclass(frozen=True)
class NucleusSpec:
    """A nucleus: position (A), gyromagnetic ratio ``g_I`` as gamma/2pi (MHz/T),
    quadrupole moment ``Q_I`` (mb), charge ``Z`` and spin ``I``."""

    position: np.ndarray
    g_I: float = 0.0
    Q_I: float = 0.0
    Z: float = 1.0
    I: float = 0.0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        if not self.Z > 0:
            raise TensorError("nuclear charge must be positive")

    @classmethod
    def isotope(cls, name, position, label=None):
        try:
            data = ISOTOPES[name]
        except KeyError:
            raise TensorError(f"no default data for isotope {name!r}") from None
        return cls(position, label=label if label is not None else name, **data)


ISOTOPES = {
    "14N": dict(g_I=3.077, Q_I=20.44, Z=7.0, I=1.0),
    "13C": dict(g_I=10.7084, Q_I=0.0, Z=6.0, I=0.5),
    "12C": dict(g_I=0.0, Q_I=0.0, Z=6.0, I=0.0),
}


def _traceless_kernel_sum(field, center, r_c):
    """``sum_r rho(r) (3 r_i r_j - delta_ij r^2) / r^5 dV`` with ``r = pos - center``."""
    rho = field.values.ravel()
    mask = rho != 0
    if not np.any(mask):
        return np.zeros((3, 3))
    r = field.positions().reshape(-1, 3)[mask] - np.asarray(center, dtype=float)
    rho = rho[mask]
    r2 = np.einsum("ni,ni->n", r, r)
    keep = r2 >= r_c**2
    r, r2, rho = r[keep], r2[keep], rho[keep]
    w = rho / (r2**2.5) * field.voxel_volume
    out = 3.0 * np.einsum("n,ni,nj->ij", w, r, r)
    iso = np.sum(w * r2)
    out -= iso * np.eye(3)
    out = 0.5 * (out + out.T)
    # remove the rounding residue of the analytically zero trace
    return out - np.trace(out) / 3.0 * np.eye(3)


def _prefactor_hyperfine(nucleus, Sz_expect):
    if Sz_expect == 0:
        raise TensorError("<S_z> must be nonzero")
    return HYPERFINE_MHZ_A3_PER_MHZ_T * nucleus.g_I / Sz_expect


def fermi_contact(rho_s, nucleus, Sz_expect):
    """Isotropic hyperfine constant (MHz) from the spin density at the nucleus."""
    pre = _prefactor_hyperfine(nucleus, Sz_expect)
    return pre * (2.0 / 3.0) * rho_s.interpolate(nucleus.position)


def dipolar_hyperfine(rho_s, nucleus, Sz_expect, r_c=DEFAULT_EXCLUSION_RADIUS):
    """Traceless anisotropic hyperfine tensor (MHz)."""
    if not rho_s.contains(nucleus.position):
        raise TensorError("nucleus lies outside the grid")
    pre = _prefactor_hyperfine(nucleus, Sz_expect)
    return pre / (4.0 * math.pi) * _traceless_kernel_sum(rho_s, nucleus.position, r_c)


def hyperfine_tensor(rho_s, nucleus, Sz_expect, r_c=DEFAULT_EXCLUSION_RADIUS):
    """Full hyperfine tensor: Fermi contact on the diagonal plus the dipolar part."""
    return (fermi_contact(rho_s, nucleus, Sz_expect) * np.eye(3)
            + dipolar_hyperfine(rho_s, nucleus, Sz_expect, r_c))


def point_charge_efg(Z, R):
    """EFG (V/A^2) at the origin from a point charge ``Z e`` at ``R`` (A)."""
    R = np.asarray(R, dtype=float)
    r2 = float(R @ R)
    if r2 == 0:
        raise TensorError("coincident nuclei")
    return COULOMB_V_A * Z * (3.0 * np.outer(R, R) - r2 * np.eye(3)) / r2**2.5


def efg_tensor(rho, nuclei, target, r_c=DEFAULT_EXCLUSION_RADIUS):
    """Electric field gradient at ``target`` (V/A^2).

    ``rho`` is the electron number density (e/A^3, positive) or ``None``;
    ``nuclei`` lists every nucleus, including ``target``, whose own charge is
    skipped.
    """
    if not any(n is target for n in nuclei):
        raise TensorError("target nucleus must be in the nuclei list")
    V = np.zeros((3, 3))
    if rho is not None:
        V -= COULOMB_V_A * _traceless_kernel_sum(rho, target.position, r_c)
    for other in nuclei:
        if other is target:
            continue
        R = other.position - target.position
        if float(R @ R) == 0:
            raise TensorError(f"nucleus {other.label!r} coincides with the target")
        V += point_charge_efg(other.Z, R)
    return 0.5 * (V + V.T)


def efg_principal_values(V):
    """Eigenvalues of a symmetric EFG ordered ``|V1| <= |V2| <= |V3|``."""
    vals = np.linalg.eigvalsh(0.5 * (np.asarray(V) + np.asarray(V).T))
    return vals[np.argsort(np.abs(vals), kind="stable")]


def quadrupole_prefactor(nucleus):
    """``e Q_I / (4 I (2I - 1))`` in MHz per (V/A^2)."""
    I = nucleus.I
    if I < 1:
        raise TensorError(f"spin I = {I} has no quadrupole moment")
    return EQ_MB_V_A2_TO_MHZ * nucleus.Q_I / (4.0 * I * (2.0 * I - 1.0))


def q_matrix(V_pas, nucleus):
    """Quadrupole tensor (MHz) in the EFG principal frame.

    ``V_pas`` are the principal values; they are put in ``|V1| <= |V2| <= |V3|``
    order before use.
    """
    p = quadrupole_prefactor(nucleus)
    V1, V2, V3 = np.asarray(V_pas, dtype=float)[np.argsort(np.abs(V_pas), kind="stable")]
    qxx = p * (V1 - V2 - V3)
    qyy = p * (-V1 + V2 - V3)
    # Algebraically equal to p * 2 V3; written this way the trace is exactly zero.
    qzz = -(qxx + qyy)
    return np.diag([qxx, qyy, qzz])


def dipolar_coupling_direct(rho_a, rho_b, chi=1, r_c=DEFAULT_EXCLUSION_RADIUS,
                            max_pairs=MAX_VOXEL_PAIRS, chunk=2048):
    """Direct density-density spin-dipolar tensor contribution (MHz).

    ``chi * mu0 g_e^2 mu_B^2 / (4 pi h) * sum rho_a(r1) rho_b(r2) (r^2 d_ij - 3 r_i r_j)/r^5 dV^2``
    with ``r = r1 - r2`` and pairs closer than ``r_c`` skipped.
    """
    if chi not in (1, -1):
        raise TensorError("chi must be +1 or -1")
    if not rho_a.same_grid(rho_b):
        raise GridMismatchError("densities must share one grid")
    a = rho_a.values.ravel()
    b = rho_b.values.ravel()
    ia, ib = np.flatnonzero(a), np.flatnonzero(b)
    if ia.size * ib.size > max_pairs:
        raise TensorError(f"{ia.size * ib.size} voxel pairs exceed the limit of {max_pairs}")
    if ia.size == 0 or ib.size == 0:
        return np.zeros((3, 3))
    pos = rho_a.positions().reshape(-1, 3)
    pa, pb = pos[ia], pos[ib]
    wa, wb = a[ia], b[ib]
    acc = np.zeros((3, 3))
    for s in range(0, ia.size, chunk):
        r = pa[s:s + chunk, None, :] - pb[None, :, :]
        r2 = np.einsum("abi,abi->ab", r, r)
        w = np.outer(wa[s:s + chunk], wb)
        far = r2 >= r_c**2
        w = np.where(far, w / np.where(far, r2, 1.0) ** 2.5, 0.0)
        acc += np.sum(w * r2) * np.eye(3) - 3.0 * np.einsum("ab,abi,abj->ij", w, r, r)
    acc *= rho_a.voxel_volume**2
    return chi * DIPOLAR_MHZ_A3 * 0.5 * (acc + acc.T)
