"""Synthetic, deterministic input bundles.

Nothing here is the output of an electronic-structure calculation: the
spectra, curvatures, lattice table and tensors are smooth analytic
constructions with NV-like magnitudes, meant for tests and demonstrations.
"""

from pathlib import Path

import numpy as np

from . import io
from .phonons import PhononMode, PhononSpectrum, spectrum_from_arrays
from .shift import CurvatureSet, LatticeTable
from .spin import InteractionTensor
from .tensors import ScalarField

A0_DIAMOND = 3.5668  # Angstrom, representative


def nv_like_spectrum(n_modes=48, label="ground"):
    """Modes spread over 2-40 THz with effective masses between 10 and 14 amu.

    Three zero-frequency translations are prepended (indices 0-2); they are
    filtered by the soft-mode cutoff.
    """
    k = np.arange(n_modes)
    freqs = 2.0 + 38.0 * ((k + 0.5) / n_modes) ** 0.8
    masses = 12.0 + 2.0 * np.sin(0.7 * k)
    modes = [PhononMode.from_thz(i, 0.0, 12.0) for i in range(3)]
    modes += [PhononMode.from_thz(3 + i, f, m) for i, (f, m) in enumerate(zip(freqs, masses))]
    return PhononSpectrum(tuple(modes), label)


def nv_like_curvatures(spectrum):
    """Curvature sets for D, Q and Azz with distinct frequency profiles (MHz/A^2)."""
    out = {}
    admitted, _ = spectrum.admitted()
    f = np.array([m.freq_thz for m in admitted])
    idx = [m.index for m in admitted]
    profiles = {
        "D": (2870.0, -600.0 * np.exp(-((f - 30.0) / 9.0) ** 2) - 80.0),
        "Q": (-4.945, 0.45 * np.exp(-((f - 30.0) / 9.0) ** 2) + 0.05),
        "Azz": (-2.16, 1.0 * np.exp(-((f - 8.0) / 6.0) ** 2) + 0.07),
    }
    for name, (nu0, d2) in profiles.items():
        out[name] = CurvatureSet.from_second_derivatives(name, dict(zip(idx, d2)), nu_zero=nu0)
    return out


def diamond_like_lattice(T_max=1000.0, step=10.0, theta=1200.0, alpha_scale=3.3e-6):
    """``a(T)`` from an Einstein-type expansion coefficient, integrated on a fine grid."""
    T_fine = np.linspace(0.0, T_max, int(T_max) * 10 + 1)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        x = theta / T_fine
        c = np.where(T_fine > 0, x**2 * np.exp(-x) / (-np.expm1(-x)) ** 2, 0.0)
    alpha = np.nan_to_num(alpha_scale * c)
    log_a = np.concatenate([[0.0], np.cumsum(0.5 * (alpha[1:] + alpha[:-1]) * np.diff(T_fine))])
    T_tab = np.arange(0.0, T_max + step / 2, step)
    a_tab = A0_DIAMOND * np.exp(np.interp(T_tab, T_fine, log_a))
    return LatticeTable(T_tab, a_tab)


def nu_of_a_samples(nu0, slope, a0=A0_DIAMOND, n=5, da=0.002):
    """Linear ``nu(a)`` samples around ``a0``; ``slope`` in MHz/A."""
    a = a0 + da * np.linspace(-1, 1, n)
    return [(float(x), float(nu0 + slope * (x - a0))) for x in a]


NU_OF_A_SLOPES = {"D": -1500.0, "Q": 1.0, "Azz": 2.0, "ZPL": -5.0e5}


def excited_spectrum(ground, softening=-0.002):
    """Uniformly softened copy of ``ground`` (relative frequency change)."""
    modes = [PhononMode(m.index, m.omega * (1 + softening) if m.omega > 0 else m.omega,
                        m.effective_mass) for m in ground.modes]
    return PhononSpectrum(tuple(modes), "excited")


def single_mode_bundle(freq_thz=10.0, mass=12.0, d2nu=-50.0):
    sp = spectrum_from_arrays([freq_thz], [mass], "single")
    cs = CurvatureSet.from_second_derivatives("single", {0: d2nu}, nu_zero=0.0)
    return sp, cs


def nv_tensors(D=2870.0, Q=-4.945, A_perp=-2.70, A_zz=-2.16):
    Dt = InteractionTensor(np.diag([-D / 3, -D / 3, 2 * D / 3]), "D")
    At = InteractionTensor(np.diag([A_perp, A_perp, A_zz]), "A")
    Qt = InteractionTensor(np.diag([-Q / 3, -Q / 3, 2 * Q / 3]), "Q")
    return Dt, At, Qt


def c13_sites():
    """Three strong shells plus weaker distinct sites (MHz), loosely axial tensors."""
    sites = []
    shells = [("C1", 3, 129.0, 0.6), ("C2", 6, 13.7, 0.3), ("C3", 3, 12.8, 0.2)]
    for name, count, strength, aniso in shells:
        for k in range(count):
            phi = 2 * np.pi * k / count
            axis = np.array([np.sin(0.6) * np.cos(phi), np.sin(0.6) * np.sin(phi), np.cos(0.6)])
            A = np.eye(3) * (1 - aniso) + 3 * aniso * np.outer(axis, axis)
            A *= strength / np.linalg.norm(A[2])
            sites.append((f"{name}_{k}", A))
    for k, s in enumerate([6.5, 4.2, 2.9, 1.1]):
        sites.append((f"Cx_{k}", s * np.eye(3)))
    return sites


def gaussian_spin_grid(center=(0.0, 0.0, 0.0), sigma=0.6, n=24, half=2.4, norm=2.0):
    s = 2 * half / n
    origin = np.full(3, -half)
    g = ScalarField.from_function(
        lambda p: np.exp(-np.sum((p - np.asarray(center)) ** 2, axis=-1) / (2 * sigma**2)),
        origin, np.eye(3) * s, (n, n, n))
    g.values *= norm / g.integral()
    return g


def write_bundle(out_dir):
    """Write the full synthetic bundle and return a dict of the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    ground = nv_like_spectrum()
    io.write_phonons(out / "phonon.txt", ground)
    paths["phonon"] = out / "phonon.txt"
    exc = excited_spectrum(ground)
    io.write_phonons(out / "phonon_excited.txt", exc)
    paths["phonon_excited"] = out / "phonon_excited.txt"
    for name, cs in nv_like_curvatures(ground).items():
        p = out / f"curvature_{name}.txt"
        io.write_curvatures(p, cs)
        paths[f"curvature_{name}"] = p
        q = out / f"nu_of_a_{name}.txt"
        io.write_nu_of_a(q, nu_of_a_samples(cs.nu_zero, NU_OF_A_SLOPES[name]))
        paths[f"nu_of_a_{name}"] = q
    io.write_nu_of_a(out / "nu_of_a_ZPL.txt", nu_of_a_samples(1.945 * 241798.9242, NU_OF_A_SLOPES["ZPL"]))
    paths["nu_of_a_ZPL"] = out / "nu_of_a_ZPL.txt"
    io.write_lattice(out / "lattice.txt", diamond_like_lattice())
    paths["lattice"] = out / "lattice.txt"

    sp, cs = single_mode_bundle()
    io.write_phonons(out / "single_phonon.txt", sp)
    io.write_curvatures(out / "single_curvature.txt", cs)
    paths["single_phonon"] = out / "single_phonon.txt"
    paths["single_curvature"] = out / "single_curvature.txt"

    Dt, At, Qt = nv_tensors()
    for name, t in (("D", Dt), ("A", At), ("Q", Qt)):
        io.write_tensor(out / f"tensor_{name}.txt", t)
    (out / "system.txt").write_text(
        f"#spinshift-system {io.SCHEMA_VERSION}\nS 1\nD tensor_D.txt\naxis 0 0 1\n"
        "nucleus 1 tensor_A.txt tensor_Q.txt 14N\n")
    paths["system"] = out / "system.txt"
    io.write_c13_sites(out / "c13_sites.txt", c13_sites())
    paths["c13"] = out / "c13_sites.txt"

    io.write_grid(out / "spin_density.txt", gaussian_spin_grid(center=(0.0, 0.0, 0.3)))
    io.write_nuclei(out / "nuclei.txt", [("N", "14N", (0.0, 0.0, -0.9)), ("C1", "13C", (0.9, 0.0, 0.6))])
    paths["spin_density"] = out / "spin_density.txt"
    paths["nuclei"] = out / "nuclei.txt"

    (out / "oracle.json").write_text(
        '{\n  "T": 300.0,\n  "nu0": 2870.0,\n  "modes": [\n'
        '    {"omega_THz": 20.0, "delta_nu_MHz": -0.05},\n'
        '    {"omega_THz": 32.0, "delta_nu_MHz": -0.12}\n  ]\n}\n')
    paths["oracle"] = out / "oracle.json"
    return paths
