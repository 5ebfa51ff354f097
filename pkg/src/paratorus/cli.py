"""Command-line front end."""

import argparse
import sys

from .errors import ConfigurationError
from .harness import SUBCOMMANDS, make_config, parse_config_file, run


def _add_common_flags(parser):
    parser.add_argument("--config", help="flat key=value configuration file")
    parser.add_argument("--preset", help="named preset to start from")
    parser.add_argument("--grid", type=int, help="points per dimension")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--s", type=float, dest="s", help="symbol order")
    parser.add_argument("--mu", type=float, help="symbol support parameter")
    parser.add_argument("--gamma", type=float, help="study Besov exponent")
    parser.add_argument("--eps-ladder", dest="eps_ladder",
                        help="e.g. 2^-2..2^-5 or 0.25,0.125")
    parser.add_argument("--samples", type=int, help="Monte-Carlo sample count")
    parser.add_argument("--r", type=float, help="moment order")
    parser.add_argument("--dt", type=float, help="output time step")
    parser.add_argument("--t-final", type=float, dest="t_final")
    parser.add_argument("--alpha-prime", type=float, dest="alpha_prime")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--symbol", help="diffusion symbol spec")
    parser.add_argument("--symbol-b", dest="symbol_b", help="forcing symbol")
    parser.add_argument("--f", help="diffusion nonlinearity spec")
    parser.add_argument("--g", help="forcing nonlinearity spec")
    parser.add_argument("--u0", help="initial condition spec")
    parser.add_argument("--floor", type=float, help="ellipticity floor")
    parser.add_argument("--cap", type=float, help="blow-up guard cap")
    parser.add_argument("--stride", type=int, help="snapshot stride")
    parser.add_argument("--estimate-grids", dest="estimate_grids",
                        help="comma list of grid sizes for check-estimates")
    parser.add_argument("--gammas", help="comma list for sample-noise")
    parser.add_argument("--emit-gnuplot", action="store_const", const=True,
                        dest="emit_gnuplot", default=None,
                        help="also write a gnuplot script for the CSVs")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="paratorus",
        description="Paracontrolled-calculus experiments on the 2-torus: "
                    "noise reports, renormalization studies, solver "
                    "convergence studies and estimate checks.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        _add_common_flags(sp)
    args = parser.parse_args(argv)

    flag_keys = {k: v for k, v in vars(args).items()
                 if k != "config" and v is not None}
    file_keys = {}
    if args.config:
        try:
            file_keys = parse_config_file(args.config)
        except (OSError, ConfigurationError) as exc:
            print("configuration error: %s" % exc)
            return 2
    try:
        cfg = make_config(file_keys, flag_keys)
    except ConfigurationError as exc:
        print("configuration error: %s" % exc)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
