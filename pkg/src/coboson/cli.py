"""Command-line front end.

Every operation is exposed as a subcommand for batch use; the ``preset``
subcommand reproduces the reference figures.  Exit codes: 0 success,
2 usage/parse error, 3 validation/domain error, 4 accuracy/convergence
error.  All error messages go to stderr with an ``error_code:`` prefix.
"""

import argparse
import os
import sys

from ._version import __version__
from .errors import (AccuracyError, DomainError, ScenarioParseError)
from .scenario import (PRESET_NAMES, load_scenario, load_scenario_file,
                       preset, run_scenario, write_result)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_ACCURACY = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error_code:{EXIT_USAGE} {message}\n")
        raise SystemExit(EXIT_USAGE)


def _default_threads():
    env = os.environ.get("COBOSON_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _common_options(sub):
    sub.add_argument("--out", default=None, metavar="PATH",
                     help="output path (default: standard output)")
    sub.add_argument("--format", choices=("csv", "json"), default=None,
                     help="output format (default: csv)")
    sub.add_argument("--threads", type=int, default=_default_threads(),
                     help="worker threads for sweep cells; 1 = serial "
                          "(env override: COBOSON_THREADS)")


def _parse_grid(text, name):
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"{name} must look like START:STOP:COUNT")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise DomainError(f"{name} must look like START:STOP:COUNT") from None
    return {"start": start, "stop": stop, "count": count}


def _parse_sweeps(specs):
    sweep = {}
    for spec in specs or ():
        if "=" not in spec:
            raise DomainError("--sweep takes NAME=START:STOP:COUNT")
        name, grid = spec.split("=", 1)
        sweep[name.strip()] = _parse_grid(grid, f"--sweep {name}")
    return sweep


def _float_list(text, name):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise DomainError(f"{name} must be a comma-separated number list") from None


def build_parser():
    parser = _Parser(prog="coboson",
                     description="Composite-boson statistics and "
                                 "non-Hermitian transfer dynamics")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    fmtcls = argparse.ArgumentDefaultsHelpFormatter

    p = subs.add_parser("coboson", formatter_class=fmtcls,
                        help="Schmidt-spectrum statistics over a range of n")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--spectrum-file", metavar="PATH",
                       help="one weight per line, '#' comments")
    group.add_argument("--uniform", type=int, metavar="J",
                       help="uniform spectrum with J modes")
    group.add_argument("--weights", metavar="W1,W2,...",
                       help="explicit weight list")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=None,
                   help="default: number of modes minus one")
    _common_options(p)

    p = subs.add_parser("qdot", formatter_class=fmtcls,
                        help="quantum-dot g2(0) and deviation table")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--r", default="0.01,0.03,0.05,0.07", metavar="R1,R2,...",
                   help="Bohr-radius-to-size ratios")
    _common_options(p)

    p = subs.add_parser("tunnel", formatter_class=fmtcls,
                        help="two-site trajectory (populations vs time)")
    p.add_argument("--omega1", type=float, default=0.0)
    p.add_argument("--omega2", type=float, default=0.0)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--gamma1", type=float, default=None,
                   help="decay rate of site 1 (overrides delta1*scale1)")
    p.add_argument("--gamma2", type=float, default=None,
                   help="decay rate of site 2 (overrides delta2*scale2)")
    p.add_argument("--delta1", type=float, default=0.1,
                   help="bosonic deviation of site 1")
    p.add_argument("--delta2", type=float, default=0.1,
                   help="bosonic deviation of site 2")
    p.add_argument("--scale1", type=float, default=1.0,
                   help="rate scale: gamma_1 = scale_1 * delta_1")
    p.add_argument("--scale2", type=float, default=1.0,
                   help="rate scale: gamma_2 = scale_2 * delta_2")
    p.add_argument("--t-max", type=float, default=12.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--time-unit", choices=("absolute", "t0"), default="absolute",
                   help="'t0' expresses time in units of the inverse "
                        "splitting at reference rates 0.1")
    p.add_argument("--sweep", action="append", metavar="NAME=START:STOP:COUNT",
                   help="sweep one parameter (at most once)")
    _common_options(p)

    p = subs.add_parser("ep-scan", formatter_class=fmtcls,
                        help="exceptional-point scan over (v, gamma_diff)")
    p.add_argument("--omega0", type=float, default=0.0)
    p.add_argument("--v-grid", required=True, metavar="START:STOP:COUNT")
    p.add_argument("--gamma-grid", required=True, metavar="START:STOP:COUNT",
                   help="grid of decay-rate half-differences")
    _common_options(p)

    p = subs.add_parser("branching", formatter_class=fmtcls,
                        help="branching fraction F2 by all three methods")
    p.add_argument("--omega0", type=float, default=0.0)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--delta1", type=float, default=0.1)
    p.add_argument("--delta2", type=float, default=0.1)
    p.add_argument("--scale1", type=float, default=1.0)
    p.add_argument("--scale2", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-7,
                   help="time-domain quadrature tolerance")
    p.add_argument("--sweep", action="append", metavar="NAME=START:STOP:COUNT",
                   help="sweep delta1/delta2/omega0/v (at most twice)")
    _common_options(p)

    p = subs.add_parser("network", formatter_class=fmtcls,
                        help="run a network scenario file "
                             "(trajectory + branching)")
    p.add_argument("scenario_file")
    _common_options(p)

    p = subs.add_parser("preset", formatter_class=fmtcls,
                        help="run a named figure scenario")
    p.add_argument("name", choices=PRESET_NAMES)
    _common_options(p)

    p = subs.add_parser("selftest", formatter_class=fmtcls,
                        help="randomized oracle-agreement suite")
    p.add_argument("--seed", type=int, default=0)

    return parser


def _scenario_from_args(args):
    if args.command == "coboson":
        if args.spectrum_file:
            source = {"file": args.spectrum_file}
            j = None
        elif args.weights:
            weights = _float_list(args.weights, "--weights")
            source = {"weights": weights}
            j = len(weights)
        else:
            j = args.uniform if args.uniform is not None else 16
            source = {"uniform": j}
        n_max = args.n_max
        if n_max is None:
            if j is None:
                raise DomainError("--n-max is required with --spectrum-file")
            n_max = max(1, j - 1)
        if n_max < args.n_min:
            raise DomainError("range must satisfy n_min <= n_max")
        return load_scenario({
            "version": 1, "kind": "coboson_sweep",
            "params": {"mode": "spectrum", "source": source},
            "sweep": {"n": {"start": args.n_min, "stop": n_max,
                            "count": n_max - args.n_min + 1}},
        })
    if args.command == "qdot":
        if args.n_max < args.n_min:
            raise DomainError("range must satisfy n_min <= n_max")
        return load_scenario({
            "version": 1, "kind": "coboson_sweep",
            "params": {"mode": "qdot"},
            "sweep": {"n": {"start": args.n_min, "stop": args.n_max,
                            "count": args.n_max - args.n_min + 1},
                      "r": _float_list(args.r, "--r")},
        })
    if args.command == "tunnel":
        params = {"omega1": args.omega1, "omega2": args.omega2, "v": args.v,
                  "t_max": args.t_max, "dt": args.dt,
                  "time_unit": args.time_unit}
        for key in ("gamma1", "gamma2", "delta1", "delta2", "scale1", "scale2"):
            value = getattr(args, key)
            if value is not None:
                params[key] = value
        sweep = _parse_sweeps(args.sweep)
        if len(sweep) > 1:
            raise DomainError("tunnel accepts at most one --sweep")
        return load_scenario({"version": 1, "kind": "tunnel",
                              "params": params, "sweep": sweep})
    if args.command == "ep-scan":
        return load_scenario({
            "version": 1, "kind": "ep_scan",
            "params": {"omega0": args.omega0},
            "sweep": {"v": _parse_grid(args.v_grid, "--v-grid"),
                      "gamma_diff": _parse_grid(args.gamma_grid, "--gamma-grid")},
        })
    if args.command == "branching":
        return load_scenario({
            "version": 1, "kind": "branching_sweep",
            "params": {"omega0": args.omega0, "v": args.v,
                       "delta1": args.delta1, "delta2": args.delta2,
                       "scale1": args.scale1, "scale2": args.scale2,
                       "tol": args.tol},
            "sweep": _parse_sweeps(args.sweep),
        })
    if args.command == "network":
        sc = load_scenario_file(args.scenario_file)
        if sc.kind != "network":
            raise DomainError(
                f"the network subcommand runs network scenarios only "
                f"(file has kind {sc.kind!r})")
        return sc
    if args.command == "preset":
        return preset(args.name)
    raise AssertionError(args.command)


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "selftest":
        from .selftest import run_selftest
        return EXIT_OK if run_selftest(args.seed) else EXIT_ACCURACY
    scenario = _scenario_from_args(args)
    result = run_scenario(scenario, threads=max(1, args.threads))
    write_result(result, path=args.out, fmt=args.format)
    return EXIT_OK


def main(argv=None):
    try:
        return run(argv)
    except SystemExit as exc:  # argparse usage errors / --help
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return code
    except ScenarioParseError as exc:
        sys.stderr.write(f"error_code:{EXIT_USAGE} {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"error_code:{EXIT_DOMAIN} {exc}\n")
        return EXIT_DOMAIN
    except AccuracyError as exc:
        sys.stderr.write(f"error_code:{EXIT_ACCURACY} {exc}\n")
        return EXIT_ACCURACY


if __name__ == "__main__":
    raise SystemExit(main())
