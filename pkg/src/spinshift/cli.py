"""``spinshift`` command-line driver."""

import argparse
import logging
import sys

import numpy as np

from . import __version__, io
from .fixtures import write_bundle
from .pipeline import (EXIT_NUMERIC, EXIT_PARSE, EXIT_VALIDATION, NumericError, RunConfig,
                       run_pipeline)

COMMANDS = ("shift", "zpl", "oracle", "levels", "tensors", "spectral", "c13", "fixtures")


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run options")
    g.add_argument("--config", help="keyed 'key = value' file; flags win over it")
    g.add_argument("--out", help="output directory")
    g.add_argument("--threads", type=int)
    g.add_argument("--omega-min", type=float, dest="omega_min", metavar="THz")
    g.add_argument("--tgrid", metavar="start:stop:step")
    g.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="spinshift", description=__doc__)
    p.add_argument("--version", action="version", version=f"spinshift {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    s = add("shift", "thermal-expansion + dynamical-phonon shift curves")
    s.add_argument("--phonon")
    s.add_argument("--displacements")
    s.add_argument("--curvature", action="append", help="curvature file (repeatable)")
    s.add_argument("--nu-of-a", action="append", dest="nu_of_a", help="nu(a) file per curvature file")
    s.add_argument("--lattice")
    s.add_argument("--absolute", action="store_true", help="keep the zero-point term")

    z = add("zpl", "zero-phonon-line shift from ground/excited spectra")
    z.add_argument("--phonon")
    z.add_argument("--excited", dest="phonon_excited")
    z.add_argument("--nu-of-a", action="append", dest="nu_of_a")
    z.add_argument("--lattice")
    z.add_argument("--absolute", action="store_true")

    o = add("oracle", "brute-force Boltzmann average")
    o.add_argument("input", nargs="?", help="JSON file with T, nu0 and (omega_THz, delta_nu_MHz) modes")

    lv = add("levels", "spin-Hamiltonian levels")
    lv.add_argument("--system")

    t = add("tensors", "hyperfine / EFG / quadrupole tensors from grids")
    t.add_argument("--grid", help="spin density grid")
    t.add_argument("--charge-grid", dest="charge_grid")
    t.add_argument("--nuclei")
    t.add_argument("--target")
    t.add_argument("--sz", type=float)
    t.add_argument("--exclusion-radius", type=float, dest="exclusion_radius")

    sp = add("spectral", "spectral densities, shift ratios and overlays")
    sp.add_argument("--phonon")
    sp.add_argument("--curvature", action="append")
    sp.add_argument("--nu-of-a", action="append", dest="nu_of_a")
    sp.add_argument("--lattice")
    sp.add_argument("--bins", type=int)
    sp.add_argument("--reference", type=int)
    sp.add_argument("--zeta", type=float)

    c = add("c13", "13C hyperfine strengths and equivalence groups")
    c.add_argument("--sites", dest="c13")
    c.add_argument("--tol", type=float)

    add("fixtures", "write the synthetic test bundle")
    return p


def _config_from_args(args):
    mapping = io.read_config(args.config) if args.config else {}
    cfg = RunConfig.from_mapping(mapping)
    for key, value in vars(args).items():
        if key in ("command", "config", "verbose", "absolute", "input") or value is None:
            continue
        setattr(cfg, key, value)
    if getattr(args, "input", None):
        cfg.oracle = args.input
    if getattr(args, "absolute", False):
        cfg.subtract_zero_point = False
    return cfg


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="spinshift: %(levelname)s: %(message)s")
    try:
        cfg = _config_from_args(args)
        if args.command == "fixtures":
            paths = write_bundle(cfg.out)
            print(f"wrote {len(paths)} fixture files to {cfg.out}")
            return 0
        summary, _ = run_pipeline(cfg, args.command)
    except io.ParseError as exc:
        print(f"spinshift: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NumericError, ZeroDivisionError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"spinshift: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"spinshift: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    sys.stdout.write(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
