"""Electro-nuclear spin Hamiltonians, level labelling and 13C hyperfine strengths.

Product-basis convention: the electron spin is the slowest index, nuclei
follow in declaration order, and each spin runs from ``m = +j`` down to
``m = -j``.
"""

from collections import namedtuple
from dataclasses import dataclass, field
import itertools
import warnings
from typing import Optional

import numpy as np

DEFAULT_MAX_DIM = 4096
_KINDS = ("D", "A", "Q", "EFG")


class SpinError(ValueError):
    pass


class AmbiguousLabelError(SpinError):
    pass


SpinOperators = namedtuple("SpinOperators", "x y z plus minus m")


def _check_spin(j):
    if j < 0 or abs(2 * j - round(2 * j)) > 1e-12:
        raise SpinError(f"invalid spin quantum number {j}")
    return round(2 * j) / 2


def spin_operators(j):
    """Angular-momentum matrices for spin ``j`` in the ``|j, m>`` basis, m descending."""
    j = _check_spin(j)
    m = np.arange(j, -j - 1, -1.0)
    jp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)
    jm = jp.conj().T
    jx = 0.5 * (jp + jm)
    jy = -0.5j * (jp - jm)
    jz = np.diag(m).astype(complex)
    return SpinOperators(jx, jy, jz, jp, jm, m)


@dataclass(frozen=True)
class InteractionTensor:
    """3x3 real coupling tensor in MHz.

    D, Q and EFG tensors must be symmetric and traceless; A is stored in full.
    """

    matrix: np.ndarray
    kind: str
    frame: str = "lab"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise SpinError("interaction tensor must be 3x3")
        if self.kind not in _KINDS:
            raise SpinError(f"unknown tensor kind {self.kind!r}")
        norm = np.linalg.norm(m)
        if self.kind != "A":
            if np.max(np.abs(m - m.T)) > 1e-10 * norm:
                raise SpinError(f"{self.kind} tensor must be symmetric")
            if abs(np.trace(m)) > 1e-8 * norm:
                raise SpinError(f"{self.kind} tensor must be traceless")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def zeros(cls, kind):
        return cls(np.zeros((3, 3)), kind)


@dataclass(frozen=True)
class Nucleus:
    I: float
    A: InteractionTensor
    Q: Optional[InteractionTensor] = None
    label: str = ""


@dataclass(frozen=True)
class SpinSystem:
    S: float
    D: InteractionTensor
    nuclei: tuple = ()
    quantization_axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        object.__setattr__(self, "S", _check_spin(self.S))
        object.__setattr__(self, "nuclei", tuple(self.nuclei))
        for n in self.nuclei:
            _check_spin(n.I)
        axis = np.asarray(self.quantization_axis, dtype=float)
        object.__setattr__(self, "quantization_axis", axis / np.linalg.norm(axis))

    @property
    def spins(self):
        return (self.S,) + tuple(n.I for n in self.nuclei)

    @property
    def dim(self):
        return int(np.prod([round(2 * j) + 1 for j in self.spins]))

    def basis_labels(self):
        """Product-basis labels ``(m_S, m_I1, ...)`` in matrix order."""
        ms = [np.arange(j, -j - 1, -1.0) for j in self.spins]
        return [tuple(float(v) for v in t) for t in itertools.product(*ms)]


def _embed(ops, k, dims):
    """Place single-spin operators of spin ``k`` into the product space."""
    out = []
    for op in ops:
        mats = [np.eye(d) for d in dims]
        mats[k] = op
        full = mats[0]
        for mat in mats[1:]:
            full = np.kron(full, mat)
        out.append(full)
    return out


def _bilinear(T, left, right):
    H = 0
    for i in range(3):
        for j in range(3):
            if T[i, j] != 0:
                H = H + T[i, j] * (left[i] @ right[j])
    return H


def build_full_hamiltonian(system, max_dim=DEFAULT_MAX_DIM):
    """``S.D.S + sum_n (S.A_n.I_n + I_n.Q_n.I_n)`` in the product basis (MHz)."""
    dim = system.dim
    if dim > max_dim:
        raise SpinError(f"Hilbert dimension {dim} exceeds limit {max_dim}")
    dims = [round(2 * j) + 1 for j in system.spins]
    ops = [_embed(spin_operators(j)[:3], k, dims) for k, j in enumerate(system.spins)]
    S = ops[0]
    H = np.zeros((dim, dim), dtype=complex) + _bilinear(system.D.matrix, S, S)
    for k, nuc in enumerate(system.nuclei, start=1):
        I = ops[k]
        H = H + _bilinear(nuc.A.matrix, S, I)
        if nuc.Q is not None:
            H = H + _bilinear(nuc.Q.matrix, I, I)
    # Each term is Hermitian analytically; symmetrize to remove rounding asymmetry.
    return 0.5 * (H + H.conj().T)


def build_principal_axis_hamiltonian(S, I, D, epsilon=0.0, Q=0.0, eta=0.0, A_diag=(0.0, 0.0, 0.0)):
    """Electron-spin plus one nucleus in the principal-axis form (MHz).

    ``H = D[Sz^2 - S(S+1)/3 + eps/6 (S+^2 + S-^2)]
          + Q[Iz^2 - I(I+1)/3 + eta/6 (I+^2 + I-^2)]
          + Axx SxIx + Ayy SyIy + Azz SzIz``

    with ``D = 3/2 Dzz``, ``eps = (Dxx - Dyy)/Dzz`` (same for Q). The ``/6``
    makes this identical to ``S.D.S`` built from the diagonal tensor.
    """
    sa = spin_operators(S)
    ia = spin_operators(I)
    dims = [sa.z.shape[0], ia.z.shape[0]]
    eS, eI = np.eye(dims[0]), np.eye(dims[1])
    Sx, Sy, Sz, Sp, Sm = (np.kron(o, eI) for o in sa[:5])
    Ix, Iy, Iz, Ip, Im = (np.kron(eS, o) for o in ia[:5])
    one = np.eye(dims[0] * dims[1])
    H = D * (Sz @ Sz - S * (S + 1) / 3 * one + epsilon / 6 * (Sp @ Sp + Sm @ Sm))
    if I >= 1:
        H = H + Q * (Iz @ Iz - I * (I + 1) / 3 * one + eta / 6 * (Ip @ Ip + Im @ Im))
    Axx, Ayy, Azz = A_diag
    H = H + Axx * Sx @ Ix + Ayy * Sy @ Iy + Azz * Sz @ Iz
    return 0.5 * (H + H.conj().T)


def build_reduced(D, Q, A_zz, warn_tensors=None):
    """Energies ``D mS^2 + Q mI^2 + A_zz mS mI`` for S = I = 1, keyed by ``(mS, mI)``.

    ``warn_tensors`` may be a ``(D, A, Q)`` triple of 3x3 arrays; a warning is
    emitted when ``|A|`` or ``|Q|`` exceeds 5% of ``|D|``, where the reduced
    form stops being a good approximation.
    """
    if warn_tensors is not None:
        nd, na, nq = (np.linalg.norm(t) for t in warn_tensors)
        if na > 0.05 * nd or nq > 0.05 * nd:
            warnings.warn("reduced Hamiltonian requested with hyperfine/quadrupole terms"
                          " above 5% of the zero-field splitting", stacklevel=2)
    return {(mS, mI): D * mS**2 + Q * mI**2 + A_zz * mS * mI
            for mS in (1, 0, -1) for mI in (1, 0, -1)}


@dataclass(frozen=True)
class LevelSet:
    energies: np.ndarray  # MHz, ascending
    labels: tuple  # dominant product-basis label per level
    weights: np.ndarray  # population of the dominant basis state
    vectors: np.ndarray  # columns are eigenvectors
    basis: tuple

    def level_of(self, label):
        label = tuple(float(v) for v in label)
        hits = [k for k, lab in enumerate(self.labels) if lab == label]
        if len(hits) != 1 or self.weights[hits[0]] <= 0.5:
            raise AmbiguousLabelError(f"state {label} has no unique dominant level")
        return hits[0]


def _dealign_degenerate(H, E, V, tol):
    """Rotate eigenvectors inside degenerate clusters towards product-basis states."""
    tag = np.diag(np.arange(H.shape[0], dtype=float))
    start = 0
    n = E.size
    while start < n:
        stop = start + 1
        while stop < n and E[stop] - E[start] <= tol:
            stop += 1
        if stop - start > 1:
            sub = V[:, start:stop]
            _, rot = np.linalg.eigh(sub.conj().T @ tag @ sub)
            V[:, start:stop] = sub @ rot
            block = V[:, start:stop]
            E[start:stop] = np.real(np.einsum("ik,ij,jk->k", block.conj(), H, block))
        start = stop
    return E, V


def diagonalize(H, system):
    """Eigen-decomposition with dominant-character labels."""
    E, V = np.linalg.eigh(H)
    scale = max(np.max(np.abs(E)), 1.0)
    # Only numerically degenerate clusters are rotated; physically split
    # levels (even by sub-Hz amounts) keep the eigh vectors.
    E, V = _dealign_degenerate(H, E.copy(), V.copy(), 1e-12 * scale)
    basis = tuple(system.basis_labels())
    pops = np.abs(V) ** 2
    dom = np.argmax(pops, axis=0)
    labels = tuple(basis[k] for k in dom)
    weights = pops[dom, np.arange(E.size)]
    return LevelSet(E, labels, weights, V, basis)


def transition_frequency(levels, from_label, to_label):
    """Positive frequency between the levels dominated by two product states (MHz)."""
    i = levels.level_of(from_label)
    j = levels.level_of(to_label)
    return float(abs(levels.energies[j] - levels.energies[i]))


@dataclass(frozen=True)
class PrincipalAxisForm:
    D: float
    epsilon: float
    Q: Optional[float]
    eta: Optional[float]
    D_axes: np.ndarray
    Q_axes: Optional[np.ndarray]


def principal_frame(tensor, axis=(0.0, 0.0, 1.0)):
    """Principal values ``(xx, yy, zz)`` and axes (columns x, y, z).

    z is the eigenvector with the largest overlap with ``axis``; x and y take
    the remaining eigenvalues in descending order, with y = z cross x.
    """
    m = np.asarray(tensor, dtype=float)
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    overlap = np.abs(axis @ vecs)
    kz = int(np.argmax(np.round(overlap, 12)))
    rest = [k for k in range(3) if k != kz]
    rest.sort(key=lambda k: -vals[k])
    z = vecs[:, kz] * (1.0 if axis @ vecs[:, kz] >= 0 else -1.0)
    x = vecs[:, rest[0]]
    y = np.cross(z, x)
    return np.array([vals[rest[0]], vals[rest[1]], vals[kz]]), np.column_stack([x, y, z])


def principal_axis_forms(D_tensor, Q_tensor=None, axis=(0.0, 0.0, 1.0)):
    """Splitting parameters ``D = 3/2 Dzz``, ``eps = (Dxx - Dyy)/Dzz`` and the Q analogues."""
    d_vals, d_axes = principal_frame(_as_matrix(D_tensor), axis)
    D = 1.5 * d_vals[2]
    eps = (d_vals[0] - d_vals[1]) / d_vals[2] if d_vals[2] != 0 else 0.0
    Q = eta = q_axes = None
    if Q_tensor is not None:
        q_vals, q_axes = principal_frame(_as_matrix(Q_tensor), axis)
        Q = 1.5 * q_vals[2]
        eta = (q_vals[0] - q_vals[1]) / q_vals[2] if q_vals[2] != 0 else 0.0
    return PrincipalAxisForm(float(D), float(eps), Q, eta, d_axes, q_axes)


def diagonal_from_splitting(D, epsilon):
    """Traceless principal values (xx, yy, zz) reproducing a given ``D`` and ``eps``."""
    zz = 2.0 * D / 3.0
    return np.array([0.5 * zz * (epsilon - 1.0), -0.5 * zz * (epsilon + 1.0), zz])


def _as_matrix(t):
    return t.matrix if isinstance(t, InteractionTensor) else np.asarray(t, dtype=float)


def c13_hyperfine_frequency(A, axis=(0.0, 0.0, 1.0)):
    """Hyperfine splitting ``|e_z . A|`` of a spin-1/2 nucleus (MHz), A in frequency units."""
    axis = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(axis) - 1.0) > 1e-10:
        raise SpinError("quantization axis must be a unit vector")
    return float(np.linalg.norm(axis @ _as_matrix(A)))


def group_equivalent_nuclei(frequencies, tol=1e-3):
    """Cluster ``(site_id, nu_A)`` pairs whose strengths agree within ``tol`` (relative).

    Returns a list of groups (lists of ``(site_id, nu_A)``), strongest first.
    Clustering is single-linkage along the sorted strengths, so the result does
    not depend on input order.
    """
    if not tol > 0:
        raise SpinError("tol must be positive")
    items = sorted(frequencies, key=lambda p: (-p[1], str(p[0])))
    groups = []
    for site, nu in items:
        if groups:
            prev = groups[-1][-1][1]
            if abs(prev - nu) <= tol * max(abs(prev), abs(nu)):
                groups[-1].append((site, nu))
                continue
        groups.append([(site, nu)])
    return groups
