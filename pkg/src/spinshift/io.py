"""Line-oriented text formats and CSV writers.

Every model file starts with a ``#spinshift-<kind> v1`` header. Blank lines
and lines starting with ``#`` after the header are ignored. Model files are
written with shortest round-trip float formatting so that write/read cycles
are bit-exact; CSV outputs use a fixed 12-significant-digit layout.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .phonons import PhononMode, PhononSpectrum
from .shift import CurvatureSample, CurvatureSet, LatticeTable
from .spin import InteractionTensor, Nucleus, SpinSystem
from .tensors import NucleusSpec, ScalarField

SCHEMA_VERSION = "v1"
BOHR_A = 0.529177210903


class ParseError(ValueError):
    """Malformed input file; carries the file path and 1-based line number."""

    def __init__(self, path, line, message):
        self.path, self.line = str(path), line
        where = f"{path}:{line}" if line else str(path)
        super().__init__(f"{where}: {message}")


class ValidationError(ValueError):
    pass


def fmt(x):
    """Fixed 12-significant-digit scientific layout for CSV output."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0:
        x = 0.0  # drop the sign of negative zero
    return f"{x:.11e}"


def _r(x):
    return repr(float(x))


def _read_lines(path, kind):
    """Yield ``(lineno, tokens)`` after checking the header line."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file ({exc.strerror})") from None
    lines = text.splitlines()
    expected = f"#spinshift-{kind}"
    first = next(((i, ln.strip()) for i, ln in enumerate(lines, 1) if ln.strip()), None)
    if first is None:
        raise ParseError(path, 0, "empty file")
    head = first[1].split()
    if head[0] != expected:
        raise ParseError(path, first[0], f"expected header {expected!r}, got {first[1]!r}")
    if len(head) < 2 or head[1] != SCHEMA_VERSION:
        raise ParseError(path, first[0], f"unsupported schema version {head[1:] or '(none)'}")
    out = []
    for i, ln in enumerate(lines[first[0]:], first[0] + 1):
        s = ln.strip()
        if not s or s.startswith("#"):
            continue
        out.append((i, s.split()))
    return path, out


def _floats(path, lineno, tokens, n=None):
    if n is not None and len(tokens) != n:
        raise ParseError(path, lineno, f"expected {n} columns, got {len(tokens)}")
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise ParseError(path, lineno, f"non-numeric value in {' '.join(tokens)!r}") from None


def _int(path, lineno, token):
    try:
        return int(token)
    except ValueError:
        raise ParseError(path, lineno, f"expected integer, got {token!r}") from None


# -- phonon spectra ---------------------------------------------------------

def read_phonons(path, label=None, displacements=None):
    path, rows = _read_lines(path, "phonon")
    modes = []
    meta_label = ""
    for lineno, tok in rows:
        if tok[0] == "label":
            meta_label = " ".join(tok[1:])
            continue
        if len(tok) != 3:
            raise ParseError(path, lineno, f"expected 3 columns, got {len(tok)}")
        idx = _int(path, lineno, tok[0])
        freq, mass = _floats(path, lineno, tok[1:])
        try:
            modes.append(PhononMode.from_thz(idx, freq, mass))
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from None
    if not modes:
        raise ParseError(path, 0, "no modes")
    if displacements is not None:
        pats = read_displacements(displacements)
        modes = [PhononMode(m.index, m.omega, m.effective_mass, pats.get(m.index)) for m in modes]
    try:
        return PhononSpectrum(tuple(modes), label if label is not None else meta_label)
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


def write_phonons(path, spectrum):
    lines = [f"#spinshift-phonon {SCHEMA_VERSION}"]
    if spectrum.label:
        lines.append(f"label {spectrum.label}")
    for m in spectrum.modes:
        lines.append(f"{m.index} {_r(m.freq_thz)} {_r(m.effective_mass)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_displacements(path):
    """Companion file: rows ``mode_index dx dy dz``, one per atom in order."""
    path, rows = _read_lines(path, "displacement")
    pats = {}
    for lineno, tok in rows:
        if len(tok) != 4:
            raise ParseError(path, lineno, f"expected 4 columns, got {len(tok)}")
        pats.setdefault(_int(path, lineno, tok[0]), []).append(_floats(path, lineno, tok[1:]))
    return {k: np.array(v) for k, v in pats.items()}


def write_displacements(path, spectrum):
    lines = [f"#spinshift-displacement {SCHEMA_VERSION}"]
    for m in spectrum.modes:
        if m.displacement_pattern is None:
            continue
        for vec in m.displacement_pattern:
            lines.append(f"{m.index} " + " ".join(_r(v) for v in vec))
    Path(path).write_text("\n".join(lines) + "\n")


# -- curvature samples ------------------------------------------------------

def read_curvatures(path, observable=None):
    path, rows = _read_lines(path, "curvature")
    obs = Path(path).stem
    samples = []
    for lineno, tok in rows:
        if tok[0] == "observable":
            obs = " ".join(tok[1:])
            continue
        if len(tok) != 5:
            raise ParseError(path, lineno, f"expected 5 columns, got {len(tok)}")
        idx = _int(path, lineno, tok[0])
        dq, plus, minus, zero = _floats(path, lineno, tok[1:])
        try:
            samples.append(CurvatureSample(idx, dq, plus, minus, zero))
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from None
    if not samples:
        raise ParseError(path, 0, "no curvature samples")
    try:
        return CurvatureSet(observable or obs, samples)
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


def write_curvatures(path, cset):
    lines = [f"#spinshift-curvature {SCHEMA_VERSION}", f"observable {cset.observable}"]
    for s in cset.samples:
        lines.append(" ".join([str(s.mode_index)] + [_r(v) for v in
                                                     (s.delta_q, s.nu_plus, s.nu_minus, s.nu_zero)]))
    Path(path).write_text("\n".join(lines) + "\n")


# -- lattice table and nu(a) ------------------------------------------------

def read_lattice(path):
    path, rows = _read_lines(path, "lattice")
    vals = [_floats(path, ln, tok, 2) for ln, tok in rows]
    if len(vals) < 2:
        raise ParseError(path, 0, "lattice table needs at least two rows")
    arr = np.array(vals)
    try:
        return LatticeTable(arr[:, 0], arr[:, 1])
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


def write_lattice(path, table):
    lines = [f"#spinshift-lattice {SCHEMA_VERSION}"]
    lines += [f"{_r(t)} {_r(a)}" for t, a in zip(table.T, table.a_values)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_nu_of_a(path):
    """Rows ``a_A nu_MHz``; the ``#spinshift-nua v1`` header is optional."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file ({exc.strerror})") from None
    pts = []
    for i, ln in enumerate(text.splitlines(), 1):
        s = ln.strip()
        if not s or s.startswith("#"):
            if s.startswith("#spinshift-") and not s.startswith("#spinshift-nua"):
                raise ParseError(path, i, f"unexpected header {s!r}")
            continue
        pts.append(_floats(path, i, s.split(), 2))
    if len(pts) < 2:
        raise ParseError(path, 0, "need at least two (a, nu) rows")
    return [tuple(p) for p in pts]


def write_nu_of_a(path, pts):
    lines = [f"#spinshift-nua {SCHEMA_VERSION}"] + [f"{_r(a)} {_r(nu)}" for a, nu in pts]
    Path(path).write_text("\n".join(lines) + "\n")


# -- tensors and spin systems -----------------------------------------------

def read_tensor(path):
    path, rows = _read_lines(path, "tensor")
    kind, frame, mat = None, "lab", []
    for lineno, tok in rows:
        if tok[0] == "kind":
            kind = tok[1] if len(tok) > 1 else None
        elif tok[0] == "frame":
            frame = tok[1]
        else:
            mat.append(_floats(path, lineno, tok, 3))
    if kind is None:
        raise ParseError(path, 0, "missing kind line")
    if len(mat) != 3:
        raise ParseError(path, 0, f"expected 3 matrix rows, got {len(mat)}")
    try:
        return InteractionTensor(np.array(mat), kind, frame)
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


def write_tensor(path, tensor):
    lines = [f"#spinshift-tensor {SCHEMA_VERSION}", f"kind {tensor.kind}", f"frame {tensor.frame}"]
    lines += [" ".join(_r(v) for v in row) for row in tensor.matrix]
    Path(path).write_text("\n".join(lines) + "\n")


def read_system(path):
    """Spin system file.

    Lines: ``S <spin>``, ``D <tensor file>``, ``axis x y z`` and any number of
    ``nucleus <I> <A file> [<Q file>|-] [label]``. Tensor paths are relative
    to the system file.
    """
    path, rows = _read_lines(path, "system")
    base = path.parent
    S, D, axis, nuclei = None, None, (0.0, 0.0, 1.0), []
    for lineno, tok in rows:
        key = tok[0]
        if key == "S":
            S = _floats(path, lineno, tok[1:], 1)[0]
        elif key == "D":
            D = read_tensor(base / tok[1])
        elif key == "axis":
            axis = tuple(_floats(path, lineno, tok[1:], 3))
        elif key == "nucleus":
            if len(tok) < 3:
                raise ParseError(path, lineno, "nucleus line needs I and an A tensor file")
            I = _floats(path, lineno, tok[1:2])[0]
            A = read_tensor(base / tok[2])
            Q = read_tensor(base / tok[3]) if len(tok) > 3 and tok[3] != "-" else None
            label = tok[4] if len(tok) > 4 else f"n{len(nuclei)}"
            nuclei.append(Nucleus(I, A, Q, label))
        else:
            raise ParseError(path, lineno, f"unknown key {key!r}")
    if S is None or D is None:
        raise ParseError(path, 0, "system file needs S and D lines")
    try:
        return SpinSystem(S, D, tuple(nuclei), np.array(axis))
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


# -- grids ------------------------------------------------------------------

def read_grid(path):
    path, rows = _read_lines(path, "grid")
    origin, spacing, dims, values = None, [], None, []
    for lineno, tok in rows:
        if tok[0] == "origin":
            origin = _floats(path, lineno, tok[1:], 3)
        elif tok[0] == "spacing":
            spacing.append(_floats(path, lineno, tok[1:], 3))
        elif tok[0] == "dims":
            if len(tok) != 4:
                raise ParseError(path, lineno, "dims needs three integers")
            dims = [_int(path, lineno, t) for t in tok[1:]]
        else:
            values.extend(_floats(path, lineno, tok))
    if origin is None or len(spacing) != 3 or dims is None:
        raise ParseError(path, 0, "grid header needs origin, three spacing lines and dims")
    try:
        return ScalarField(origin, spacing, dims, np.array(values))
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


def write_grid(path, field, per_line=6):
    lines = [f"#spinshift-grid {SCHEMA_VERSION}",
             "origin " + " ".join(_r(v) for v in field.origin)]
    lines += ["spacing " + " ".join(_r(v) for v in row) for row in field.spacing]
    lines.append("dims " + " ".join(str(d) for d in field.dims))
    flat = field.flat_values()
    for s in range(0, flat.size, per_line):
        lines.append(" ".join(_r(v) for v in flat[s:s + per_line]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_cube(path, density=True):
    """Convert a Gaussian-style cube file to a :class:`ScalarField` in Angstrom.

    Cube data are z-fastest; lengths in Bohr when the voxel counts are
    positive. With ``density=True`` values are rescaled from per-Bohr^3 to
    per-Angstrom^3. Returns ``(field, atoms)`` with atoms as ``(Z, position)``.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    try:
        head = lines[2].split()
        natoms = int(head[0])
        origin = np.array([float(v) for v in head[1:4]])
        dims, vecs = [], []
        for k in range(3):
            tok = lines[3 + k].split()
            dims.append(int(tok[0]))
            vecs.append([float(v) for v in tok[1:4]])
        bohr = dims[0] > 0
        dims = [abs(d) for d in dims]
        scale = BOHR_A if bohr else 1.0
        atoms = []
        for k in range(abs(natoms)):
            tok = lines[6 + k].split()
            atoms.append((int(tok[0]), np.array([float(v) for v in tok[2:5]]) * scale))
        start = 6 + abs(natoms) + (1 if natoms < 0 else 0)
        data = np.array([float(v) for ln in lines[start:] for v in ln.split()])
    except (IndexError, ValueError):
        raise ParseError(path, 0, "malformed cube file") from None
    if data.size != math.prod(dims):
        raise ParseError(path, 0, f"expected {math.prod(dims)} values, got {data.size}")
    values = data.reshape(dims)  # C order matches z-fastest [i, j, k]
    if density and bohr:
        values = values / BOHR_A**3
    return ScalarField(origin * scale, np.array(vecs) * scale, dims, values), atoms


def read_nuclei(path):
    """Rows ``label isotope x y z`` (Angstrom)."""
    path, rows = _read_lines(path, "nuclei")
    out = []
    for lineno, tok in rows:
        if len(tok) != 5:
            raise ParseError(path, lineno, f"expected 5 columns, got {len(tok)}")
        pos = _floats(path, lineno, tok[2:])
        try:
            out.append(NucleusSpec.isotope(tok[1], pos, label=tok[0]))
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from None
    if not out:
        raise ParseError(path, 0, "no nuclei")
    return out


def write_nuclei(path, entries):
    """``entries`` are ``(label, isotope, position)`` triples."""
    lines = [f"#spinshift-nuclei {SCHEMA_VERSION}"]
    lines += [f"{lab} {iso} " + " ".join(_r(v) for v in pos) for lab, iso, pos in entries]
    Path(path).write_text("\n".join(lines) + "\n")


def read_c13_sites(path):
    """Rows ``site_id`` followed by the nine A-tensor entries (MHz, row-major)."""
    path, rows = _read_lines(path, "c13")
    sites = []
    for lineno, tok in rows:
        if len(tok) != 10:
            raise ParseError(path, lineno, f"expected 10 columns, got {len(tok)}")
        sites.append((tok[0], np.array(_floats(path, lineno, tok[1:])).reshape(3, 3)))
    if not sites:
        raise ParseError(path, 0, "no sites")
    return sites


def write_c13_sites(path, sites):
    lines = [f"#spinshift-c13 {SCHEMA_VERSION}"]
    lines += [f"{sid} " + " ".join(_r(v) for v in np.asarray(A).ravel()) for sid, A in sites]
    Path(path).write_text("\n".join(lines) + "\n")


# -- oracle input and config ------------------------------------------------

def read_oracle_input(path):
    """JSON object with ``T``, optional ``nu0`` and ``n_max``, and ``modes``.

    Each mode gives ``omega_THz`` (linear frequency) and ``delta_nu_MHz``
    (``delta_omega / 2 pi``).
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.msg) from None
    try:
        modes = [(float(m["omega_THz"]), float(m["delta_nu_MHz"])) for m in data["modes"]]
        return dict(T=float(data["T"]), nu0=float(data.get("nu0", 0.0)),
                    n_max=data.get("n_max"), modes=modes)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(path, 0, f"invalid oracle input ({exc})") from None


def read_config(path):
    """``key = value`` lines; ``#`` starts a comment."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file ({exc.strerror})") from None
    out = {}
    for i, ln in enumerate(text.splitlines(), 1):
        s = ln.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ParseError(path, i, "expected 'key = value'")
        k, v = (p.strip() for p in s.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


# -- CSV outputs ------------------------------------------------------------

def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


SHIFT_COLUMNS = ["T_K", "dNu_total_MHz", "dNu_expansion_MHz", "dNu_dynamic_MHz", "dNudT_kHz_per_K"]


def write_shift_curve(path, curve):
    _write_csv(path, SHIFT_COLUMNS, zip(curve.temperatures, curve.total, curve.expansion_term,
                                        curve.dynamic_term, curve.derivative))


def read_shift_curve(path):
    from .shift import ShiftCurve

    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return ShiftCurve(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4], Path(path).stem)


def write_spectral_density(path, sd):
    from .constants import rad_s_to_thz

    _write_csv(path, ["omega_THz", "S_value"], zip(rad_s_to_thz(sd.bin_centers), sd.weights))


def write_overlay(path, overlay, k):
    _write_csv(path, ["dNu_ref", "dNu_i", "slope"],
               zip(overlay.reference, overlay.shifts[k], overlay.slopes[k]))


def write_levels(path, levels):
    rows = [(str(i), levels.energies[i], " ".join(f"{m:+g}" for m in levels.labels[i]), levels.weights[i])
            for i in range(levels.energies.size)]
    _write_csv(path, ["level", "energy_MHz", "label", "weight"], rows)
