"""Run configuration, fail-fast input validation and output bundles."""

from dataclasses import dataclass, field, fields
import logging
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import io
from .oracle import OccupationEnsemble, oracle_average
from .phonons import DEFAULT_OMEGA_MIN_THZ
from .shift import DEFAULT_T_GRID, total_shift_curve, zpl_shift
from .spectral import correlation_overlay, shift_ratio, spectral_density
from .spin import (build_full_hamiltonian, build_reduced, c13_hyperfine_frequency, diagonalize,
                   group_equivalent_nuclei, principal_axis_forms, transition_frequency)
from .constants import THZ_TO_RAD_S, mhz_to_rad_s

log = logging.getLogger("spinshift")

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4

ROOM_T = 300.0


class NumericError(ArithmeticError):
    pass


def parse_tgrid(spec):
    """``"start:stop:step"`` with ``stop`` included."""
    try:
        start, stop, step = (float(v) for v in str(spec).split(":"))
    except ValueError:
        raise io.ValidationError(f"bad T grid {spec!r}; expected start:stop:step") from None
    if step <= 0 or stop < start or start < 0:
        raise io.ValidationError(f"bad T grid {spec!r}")
    n = int(round((stop - start) / step)) + 1
    return start + step * np.arange(n)


@dataclass
class RunConfig:
    phonon: Optional[str] = None
    phonon_excited: Optional[str] = None
    displacements: Optional[str] = None
    curvature: List[str] = field(default_factory=list)
    nu_of_a: List[str] = field(default_factory=list)
    lattice: Optional[str] = None
    system: Optional[str] = None
    grid: Optional[str] = None
    charge_grid: Optional[str] = None
    nuclei: Optional[str] = None
    target: Optional[str] = None
    sz: float = 1.0
    c13: Optional[str] = None
    oracle: Optional[str] = None
    tgrid: Optional[str] = None
    omega_min: float = DEFAULT_OMEGA_MIN_THZ
    delta_q: float = 0.03
    zeta: float = 0.0
    subtract_zero_point: bool = True
    bins: int = 200
    reference: int = 0
    tol: float = 1e-3
    exclusion_radius: float = 0.05
    threads: int = 1
    out: str = "spinshift_out"

    @classmethod
    def from_mapping(cls, mapping):
        """Coerce string values (from a config file) to field types."""
        kwargs = {}
        known = {f.name: f for f in fields(cls)}
        for key, value in mapping.items():
            if key not in known:
                raise io.ValidationError(f"unknown config key {key!r}")
            default = getattr(cls(), key)
            if isinstance(default, list):
                kwargs[key] = value.split() if isinstance(value, str) else list(value)
            elif isinstance(default, bool):
                kwargs[key] = str(value).lower() in ("1", "true", "yes", "on")
            elif isinstance(default, int):
                kwargs[key] = int(value)
            elif isinstance(default, float):
                kwargs[key] = float(value)
            else:
                kwargs[key] = value
        return cls(**kwargs)

    @property
    def temperatures(self):
        return DEFAULT_T_GRID.copy() if self.tgrid is None else parse_tgrid(self.tgrid)


@dataclass
class InputModel:
    config: RunConfig
    ground: object = None
    excited: object = None
    curvatures: list = field(default_factory=list)
    nu_of_a: list = field(default_factory=list)
    lattice: object = None
    system: object = None
    grid: object = None
    charge_grid: object = None
    nuclei: list = None
    c13: list = None
    oracle: dict = None
    report: list = field(default_factory=list)


REQUIRED = {
    "shift": ("phonon", "curvature"),
    "zpl": ("phonon", "phonon_excited"),
    "oracle": ("oracle",),
    "levels": ("system",),
    "tensors": ("nuclei", "target"),
    "spectral": ("phonon", "curvature"),
    "c13": ("c13",),
}


def parse_inputs(config, command):
    """Read and validate every referenced file before any computation."""
    for key in REQUIRED.get(command, ()):
        if not getattr(config, key):
            raise io.ValidationError(f"{command}: missing required input {key!r}")
    if config.threads < 1:
        raise io.ValidationError("threads must be >= 1")
    if config.omega_min < 0:
        raise io.ValidationError("omega_min must be non-negative")
    if config.zeta not in (0.0, 0.5):
        raise io.ValidationError("zeta must be 0 or 0.5")
    m = InputModel(config)
    T = config.temperatures
    if config.phonon:
        m.ground = io.read_phonons(config.phonon, displacements=config.displacements)
        _, n_excl = m.ground.admitted(config.omega_min)
        m.report.append(f"modes: {len(m.ground)} read, {n_excl} excluded below {config.omega_min:g} THz")
        if n_excl:
            log.warning("%d mode(s) below %g THz excluded from thermal sums", n_excl, config.omega_min)
    if config.phonon_excited:
        m.excited = io.read_phonons(config.phonon_excited)
        if len(m.excited) != len(m.ground):
            raise io.ValidationError("ground and excited spectra have different mode counts")
    m.curvatures = [io.read_curvatures(p) for p in config.curvature]
    if config.nu_of_a:
        expected = len(m.curvatures) if command != "zpl" else 1
        if len(config.nu_of_a) != expected:
            raise io.ValidationError(f"expected {expected} nu(a) file(s), got {len(config.nu_of_a)}")
        m.nu_of_a = [io.read_nu_of_a(p) for p in config.nu_of_a]
        if config.lattice is None:
            raise io.ValidationError("nu(a) input needs a lattice table")
    if config.lattice:
        m.lattice = io.read_lattice(config.lattice)
        if m.nu_of_a:
            try:
                m.lattice.check_range(np.append(T, 0.0))
            except ValueError as exc:
                raise io.ValidationError(str(exc)) from None
    if m.ground is not None:
        admitted, _ = m.ground.admitted(config.omega_min)
        for cs in m.curvatures:
            missing = [md.index for md in admitted if md.index not in cs]
            if missing:
                raise io.ValidationError(f"{cs.observable}: no curvature for mode(s) {missing[:5]}")
            m.report.append(f"curvature {cs.observable}: {len(cs)} samples")
    if config.system:
        m.system = io.read_system(config.system)
    if config.grid:
        m.grid = io.read_grid(config.grid)
    if config.charge_grid:
        m.charge_grid = io.read_grid(config.charge_grid)
    if config.nuclei:
        m.nuclei = io.read_nuclei(config.nuclei)
        if config.target and config.target not in [n.label for n in m.nuclei]:
            raise io.ValidationError(f"target {config.target!r} not in nuclei file")
    if config.c13:
        m.c13 = io.read_c13_sites(config.c13)
    if config.oracle:
        m.oracle = io.read_oracle_input(config.oracle)
    return m


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NumericError("non-finite values in results")


def _room(curve):
    if not curve.temperatures[0] <= ROOM_T <= curve.temperatures[-1]:
        return None
    return curve.at(ROOM_T)


def run_pipeline(config, command):
    """Validate inputs, run ``command`` and write its output bundle.

    Returns ``(summary_text, written_paths)``.
    """
    model = parse_inputs(config, command)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    runner = _COMMANDS[command]
    lines, paths = runner(model, out)
    summary = "\n".join(model.report + lines) + "\n"
    if command != "oracle":
        (out / "summary.txt").write_text(summary)
        paths.append(out / "summary.txt")
    return summary, paths


def _shift_curves(model):
    c = model.config
    curves = []
    for k, cs in enumerate(model.curvatures):
        nua = model.nu_of_a[k] if model.nu_of_a else None
        curves.append(total_shift_curve(model.ground, cs, model.lattice, nua, c.temperatures,
                                        c.subtract_zero_point, c.omega_min, c.threads))
    return curves


def _run_shift(model, out):
    lines, paths = [], []
    for curve in _shift_curves(model):
        _check_finite(curve.total, curve.derivative)
        p = out / f"shift_{curve.observable}.csv"
        io.write_shift_curve(p, curve)
        paths.append(p)
        room = _room(curve)
        if room is not None:
            lines.append(f"{curve.observable}: dNu(300 K) = {io.fmt(room[0])} MHz, "
                         f"dNu/dT(300 K) = {io.fmt(room[1])} kHz/K")
    return lines, paths


def _run_zpl(model, out):
    c = model.config
    nua = model.nu_of_a[0] if model.nu_of_a else None
    curve = zpl_shift(model.ground, model.excited, nua, model.lattice, c.temperatures,
                      c.subtract_zero_point, c.omega_min)
    _check_finite(curve.total)
    p = out / "shift_ZPL.csv"
    io.write_shift_curve(p, curve)
    room = _room(curve)
    lines = [] if room is None else [f"ZPL: dNu(300 K) = {io.fmt(room[0])} MHz, "
                                     f"dNu/dT(300 K) = {io.fmt(room[1])} kHz/K"]
    return lines, [p]


def _run_oracle(model, out):
    o = model.oracle
    pairs = [(f * THZ_TO_RAD_S, mhz_to_rad_s(d)) for f, d in o["modes"]]
    res = oracle_average(OccupationEnsemble(tuple(pairs), o["T"], o["n_max"]), o["nu0"])
    return [f"average_MHz = {io.fmt(res.average)}",
            f"tail_bound_MHz = {io.fmt(res.tail_bound)}",
            f"configurations = {res.n_configurations}"], []


def _run_levels(model, out):
    system = model.system
    H = build_full_hamiltonian(system)
    _check_finite(H)
    levels = diagonalize(H, system)
    p = out / "levels.csv"
    io.write_levels(p, levels)
    lines = [f"hilbert_dim = {system.dim}"]
    pa = principal_axis_forms(system.D, system.nuclei[0].Q if system.nuclei and system.nuclei[0].Q else None,
                              system.quantization_axis)
    lines.append(f"D_MHz = {io.fmt(pa.D)}, epsilon = {io.fmt(pa.epsilon)}")
    if pa.Q is not None:
        lines.append(f"Q_MHz = {io.fmt(pa.Q)}, eta = {io.fmt(pa.eta)}")
    if system.S == 1 and len(system.nuclei) == 1 and system.nuclei[0].I == 1:
        nuc = system.nuclei[0]
        q = pa.Q if pa.Q is not None else 0.0
        # The reduced model assumes the lab z axis is the symmetry axis.
        red = build_reduced(pa.D, q, nuc.A.matrix[2, 2],
                            (system.D.matrix, nuc.A.matrix, nuc.Q.matrix if nuc.Q else np.zeros((3, 3))))
        lines.append(f"reduced (0, 0) -> (-1, 0): {io.fmt(red[(-1, 0)] - red[(0, 0)])} MHz")
        for a, b in (((0, 0), (-1, 0)), ((0, 0), (1, 0)), ((-1, 0), (-1, 1)), ((0, 0), (0, 1))):
            try:
                nu = transition_frequency(levels, a, b)
            except ValueError:
                continue
            lines.append(f"transition {a} -> {b}: {io.fmt(nu)} MHz")
    return lines, [p]


def _run_tensors(model, out):
    from .spin import InteractionTensor
    from .tensors import efg_principal_values, efg_tensor, hyperfine_tensor, q_matrix

    c = model.config
    target = next(n for n in model.nuclei if n.label == c.target)
    lines, paths = [], []
    if model.grid is not None and target.g_I != 0:
        A = hyperfine_tensor(model.grid, target, c.sz, c.exclusion_radius)
        _check_finite(A)
        p = out / f"tensor_A_{target.label}.txt"
        io.write_tensor(p, InteractionTensor(A, "A"))
        paths.append(p)
        lines.append(f"A_zz_MHz = {io.fmt(A[2, 2])}")
    V = efg_tensor(model.charge_grid, model.nuclei, target, c.exclusion_radius)
    _check_finite(V)
    lines.append("EFG_V_per_A2 = " + " ".join(io.fmt(v) for v in np.diag(V)))
    if target.I >= 1:
        Q = q_matrix(efg_principal_values(V), target)
        p = out / f"tensor_Q_{target.label}.txt"
        io.write_tensor(p, InteractionTensor(Q, "Q", "principal-axis"))
        paths.append(p)
        lines.append(f"Q_MHz = {io.fmt(1.5 * Q[2, 2])}")
    return lines, paths


def _run_spectral(model, out):
    c = model.config
    lines, paths = [], []
    curves = _shift_curves(model)
    admitted, _ = model.ground.admitted(c.omega_min)
    edges = np.linspace(0.0, 1.05 * max(m.omega for m in admitted), c.bins + 1)
    dens = [spectral_density(model.ground, cs, edges, c.omega_min) for cs in model.curvatures]
    for sd in dens:
        p = out / f"spectral_{sd.observable}.csv"
        io.write_spectral_density(p, sd)
        paths.append(p)
    ov = correlation_overlay(curves, c.reference)
    ref = dens[c.reference]
    T = c.temperatures
    Tpos = T[T > 0]
    for k, sd in enumerate(dens):
        if k == c.reference:
            continue
        p = out / f"overlay_{sd.observable}_vs_{ref.observable}.csv"
        io.write_overlay(p, ov, k)
        paths.append(p)
        if Tpos.size:
            r = shift_ratio(sd, ref, Tpos, c.zeta)
            lines.append(f"ratio {sd.observable}/{ref.observable}: {io.fmt(r[0])} at {Tpos[0]:g} K, "
                         f"{io.fmt(r[-1])} at {Tpos[-1]:g} K")
    return lines, paths


def _run_c13(model, out):
    c = model.config
    freqs = [(sid, c13_hyperfine_frequency(A)) for sid, A in model.c13]
    groups = group_equivalent_nuclei(freqs, c.tol)
    p = out / "c13_groups.csv"
    rows = []
    for g, members in enumerate(groups):
        for sid, nu in members:
            rows.append((str(g), sid, nu))
    io._write_csv(p, ["group", "site_id", "nu_A_MHz"], rows)
    lines = [f"group {g}: {len(m)} site(s), nu_A = {io.fmt(m[0][1])} MHz" for g, m in enumerate(groups[:3])]
    return lines, [p]


_COMMANDS = {
    "shift": _run_shift,
    "zpl": _run_zpl,
    "oracle": _run_oracle,
    "levels": _run_levels,
    "tensors": _run_tensors,
    "spectral": _run_spectral,
    "c13": _run_c13,
}
