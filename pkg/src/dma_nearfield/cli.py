"""Command-line front end.

Exit codes: 0 success, 2 bad configuration or arguments, 3 numerical
failure (no root in bracket, undefined beam depth).
"""
import argparse
import os
import sys
import time
from dataclasses import replace

from . import __version__
from ._backend import BACKEND
from .beamdepth import NoRootInBracket, UndefinedBeamDepth
from .figures import (
    FIGURE_BUILDERS,
    OUTDIR_ENV,
    ConfigError,
    RunConfig,
    coerce_value,
    depth_bundle,
    figure_config,
    fit_bundle,
    gain_curve_bundle,
    load_config,
    write_bundle,
    xdelta_bundle,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

# (flag, config key, help)
_OVERRIDES = [
    ("--N-m", "N_m", "number of microstrips"),
    ("--N-e", "N_e", "elements per microstrip"),
    ("--d-e", "d_e", "element spacing along a microstrip [m]"),
    ("--d-m", "d_m", "microstrip spacing [m]"),
    ("--lambda", "lambda_", "wavelength [m]"),
    ("--alpha", "alpha", "microstrip attenuation [1/m]"),
    ("--beta", "beta", "microstrip wavenumber [rad/m], default 2 pi / lambda"),
    ("--P-b", "P_b", "transmit power"),
    ("--r", "r", "user range [m]"),
    ("--phi", "phi", "user azimuth [rad], accepts expressions like pi/3"),
    ("--theta", "theta", "user elevation [rad]"),
    ("--delta", "delta", "gain fraction defining the beam depth"),
    ("--alpha-list", "alpha_list", "comma-separated attenuations for gain curves"),
    ("--delta-list", "delta_list", "comma-separated gain fractions"),
    ("--dr-range", "dr_range", "range-mismatch sweep start:stop:step [m]"),
    ("--w-range", "w_range", "w sweep start:stop:step"),
    ("--mode", "mode", "distance model: exact, fresnel, fresnel-no-bilinear"),
    ("--x-source", "x_source", "x_delta source for beam depth: numeric or model"),
    ("--format", "output_format", "csv, or json to add a JSON mirror"),
]

_COMMANDS = {
    "gain-curve": (gain_curve_bundle, "relative gain against range mismatch"),
    "xdelta": (xdelta_bundle, "x_delta(w) numerically and from the piecewise-linear model"),
    "depth": (depth_bundle, "beam-depth limits across a w sweep"),
    "fit": (fit_bundle, "refit the piecewise-linear x_delta model"),
}


def _add_common(p):
    p.add_argument("--config", help="key = value file (a previous .manifest works too)")
    p.add_argument("--outdir", help=f"output directory (default ${OUTDIR_ENV} or ./out)")
    p.add_argument("--stem", help="file name stem for the outputs")
    g = p.add_argument_group("parameter overrides")
    for flag, key, text in _OVERRIDES:
        g.add_argument(flag, dest=f"ov_{key}", metavar="VALUE", help=text)
    g.add_argument("--fit", dest="ov_fit", action="store_const", const="true",
                   help="also refit the model (xdelta)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dma-nearfield",
        description="Beamforming gain and beam depth of lossy dynamic metasurface antennas.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, text) in _COMMANDS.items():
        _add_common(sub.add_parser(name, help=text, description=text))
    rep = sub.add_parser("reproduce", help="regenerate a figure's data with its parameters",
                         description="Regenerate figure data (1: gain curves, 2: x_delta, 3: beam depth).")
    rep.add_argument("--figure", type=int, choices=sorted(FIGURE_BUILDERS), required=True)
    _add_common(rep)
    return parser


def resolve_config(args, base):
    cfg = base
    if args.config:
        cfg = load_config(args.config, base=cfg)
    updates = {}
    for key in [k for _, k, _ in _OVERRIDES] + ["fit"]:
        raw = getattr(args, f"ov_{key}", None)
        if raw is None:
            continue
        try:
            updates[key] = coerce_value(key, raw)
        except ValueError as exc:
            raise ConfigError(f"--{key.rstrip('_').replace('_', '-')}: {exc}") from None
    return replace(cfg, **updates) if updates else cfg


def _outdir(args):
    return args.outdir or os.environ.get(OUTDIR_ENV) or "out"


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "reproduce":
            base = figure_config(args.figure)
            builder = FIGURE_BUILDERS[args.figure]
            stem = args.stem or f"fig{args.figure}"
        else:
            base = RunConfig()
            builder = _COMMANDS[args.command][0]
            stem = args.stem or args.command.replace("-", "_")
        cfg = resolve_config(args, base)
        start = time.perf_counter()
        bundle = builder(cfg, stem=stem)
        if args.command == "reproduce":
            bundle.extra_manifest = {"figure": str(args.figure), **bundle.extra_manifest}
        paths = write_bundle(bundle, _outdir(args), time.perf_counter() - start)
    except (ConfigError, OSError) as exc:
        print(f"dma-nearfield: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoRootInBracket, UndefinedBeamDepth) as exc:
        print(f"dma-nearfield: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
