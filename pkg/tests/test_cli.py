import math
import subprocess
import sys

import numpy as np
import pytest
from scipy import constants as sc

from spinshift import io
from spinshift.cli import main
from spinshift.fixtures import write_bundle


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    d = tmp_path_factory.mktemp("bundle")
    return write_bundle(d)


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fixtures_command(tmp_path, capsys):
    code, out, _ = run(["fixtures", "--out", tmp_path / "fx"], capsys)
    assert code == 0 and "fixture files" in out
    assert (tmp_path / "fx" / "phonon.txt").exists()


def test_shift_command(bundle, tmp_path, capsys):
    code, out, _ = run(["shift", "--phonon", bundle["phonon"], "--curvature", bundle["curvature_D"],
                        "--nu-of-a", bundle["nu_of_a_D"], "--lattice", bundle["lattice"],
                        "--out", tmp_path], capsys)
    assert code == 0
    assert "3 excluded" in out and "dNu/dT(300 K)" in out
    curve = io.read_shift_curve(tmp_path / "shift_D.csv")
    assert curve.temperatures.size == 251
    assert curve.total[0] == 0.0
    assert (tmp_path / "summary.txt").read_text() == out


def test_zero_curvature_gives_flat_curve(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("#spinshift-phonon v1\n0 10.0 12.0\n1 20.0 12.0\n")
    c = tmp_path / "c.txt"
    c.write_text("#spinshift-curvature v1\nobservable Z\n0 0.03 5 5 5\n1 0.03 5 5 5\n")
    code, _, _ = run(["shift", "--phonon", p, "--curvature", c, "--out", tmp_path / "o"], capsys)
    assert code == 0
    curve = io.read_shift_curve(tmp_path / "o" / "shift_Z.csv")
    assert np.all(curve.total == 0) and np.all(curve.derivative == 0)


def test_single_mode_closed_form(bundle, tmp_path, capsys):
    code, _, _ = run(["shift", "--phonon", bundle["single_phonon"], "--curvature", bundle["single_curvature"],
                      "--absolute", "--tgrid", "0:300:100", "--out", tmp_path], capsys)
    assert code == 0
    curve = io.read_shift_curve(tmp_path / "shift_single.csv")
    w = 2 * math.pi * 10e12
    x = sc.hbar * w / (sc.k * 300.0)
    expected = 0.5 * -50.0 * sc.hbar / (12 * sc.atomic_mass * w) * 1e20 * (1 / math.expm1(x) + 0.5)
    assert curve.total[-1] == pytest.approx(expected, rel=1e-11)


def test_zpl_identical_spectra(bundle, tmp_path, capsys):
    code, _, _ = run(["zpl", "--phonon", bundle["phonon"], "--excited", bundle["phonon"],
                      "--out", tmp_path], capsys)
    assert code == 0
    assert np.all(io.read_shift_curve(tmp_path / "shift_ZPL.csv").total == 0)


def test_zpl_command(bundle, tmp_path, capsys):
    code, out, _ = run(["zpl", "--phonon", bundle["phonon"], "--excited", bundle["phonon_excited"],
                        "--nu-of-a", bundle["nu_of_a_ZPL"], "--lattice", bundle["lattice"],
                        "--out", tmp_path], capsys)
    assert code == 0 and "ZPL" in out
    assert io.read_shift_curve(tmp_path / "shift_ZPL.csv").total[-1] < 0


def test_oracle_command(bundle, tmp_path, capsys):
    code, out, _ = run(["oracle", bundle["oracle"], "--out", tmp_path], capsys)
    assert code == 0 and "average_MHz" in out
    avg = float(out.split("average_MHz = ")[1].split()[0])
    n = lambda f: 1 / math.expm1(sc.h * f * 1e12 / (sc.k * 300.0))
    assert avg == pytest.approx(2870 - 0.05 * (n(20) + 0.5) - 0.12 * (n(32) + 0.5), rel=1e-11)


def test_levels_command(bundle, tmp_path, capsys):
    code, out, _ = run(["levels", "--system", bundle["system"], "--out", tmp_path], capsys)
    assert code == 0
    assert "hilbert_dim = 9" in out and "transition (0, 0) -> (-1, 0)" in out
    assert len((tmp_path / "levels.csv").read_text().splitlines()) == 10


def test_tensors_command(bundle, tmp_path, capsys):
    for target in ("N", "C1"):
        code, out, _ = run(["tensors", "--grid", bundle["spin_density"], "--nuclei", bundle["nuclei"],
                            "--target", target, "--out", tmp_path], capsys)
        assert code == 0 and "EFG_V_per_A2" in out
    assert (tmp_path / "tensor_Q_N.txt").exists() and (tmp_path / "tensor_A_C1.txt").exists()
    Q = io.read_tensor(tmp_path / "tensor_Q_N.txt").matrix
    assert np.trace(Q) == 0.0


def test_spectral_command(bundle, tmp_path, capsys):
    code, out, _ = run(["spectral", "--phonon", bundle["phonon"], "--curvature", bundle["curvature_D"],
                        "--curvature", bundle["curvature_Q"], "--out", tmp_path], capsys)
    assert code == 0 and "ratio Q/D" in out
    assert (tmp_path / "overlay_Q_vs_D.csv").exists() and (tmp_path / "spectral_D.csv").exists()


def test_c13_command(bundle, tmp_path, capsys):
    code, out, _ = run(["c13", "--sites", bundle["c13"], "--out", tmp_path], capsys)
    assert code == 0
    assert "group 0: 3 site(s), nu_A = 1.29000000000e+02 MHz" in out


def test_config_file_and_flag_override(bundle, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"phonon = {bundle['single_phonon']}\ncurvature = {bundle['single_curvature']}\n"
                   f"tgrid = 0:10:5\nout = {tmp_path / 'from_cfg'}\n")
    code, _, _ = run(["shift", "--config", cfg, "--tgrid", "0:20:5"], capsys)
    assert code == 0
    assert io.read_shift_curve(tmp_path / "from_cfg" / "shift_single.csv").temperatures[-1] == 20


def test_exit_code_parse(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("#spinshift-phonon v1\n0 ten 12\n")
    code, _, err = run(["shift", "--phonon", p, "--curvature", p, "--out", tmp_path], capsys)
    assert code == 2 and ":2:" in err


def test_exit_code_validation(bundle, tmp_path, capsys):
    code, _, err = run(["shift", "--phonon", bundle["phonon"], "--out", tmp_path], capsys)
    assert code == 3 and "curvature" in err
    code, _, _ = run(["shift", "--phonon", bundle["phonon"], "--curvature", bundle["curvature_D"],
                      "--tgrid", "0:5000:10", "--nu-of-a", bundle["nu_of_a_D"], "--lattice", bundle["lattice"],
                      "--out", tmp_path], capsys)
    assert code == 3


def test_exit_code_numeric(bundle, tmp_path, capsys):
    c = tmp_path / "zero.txt"
    rows = [f"{i} 0.03 1.0 1.0 1.0" for i in range(3, 51)]
    c.write_text("#spinshift-curvature v1\nobservable Z\n" + "\n".join(rows) + "\n")
    code, _, err = run(["spectral", "--phonon", bundle["phonon"], "--curvature", c,
                        "--curvature", bundle["curvature_D"], "--reference", "0", "--out", tmp_path], capsys)
    assert code == 4 and "numeric" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["nosuchcommand"])
    assert exc.value.code == 2


def test_console_script_version():
    r = subprocess.run([sys.executable, "-m", "spinshift.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("spinshift ")
