"""
Command-line front end.

Every subcommand validates its parameters before any sampling starts, writes
one report (JSON, or CSV where a tabular view exists) to ``--out``, to
``$RADON_SAMPLING_OUTPUT_DIR/<subcommand>.<format>``, or to stdout, and exits
with 0 on success, 2 on a configuration error and 3 on a numerical failure.
Errors are reported on stderr as a one-line JSON record.
"""

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from .convex_sim import make_isotropic_body, run_ellipse_experiment, run_tail_checks, \
    run_zero_one_experiment
from .errors import ConfigError, DomainError, NumericalError
from .montecarlo import ExperimentReport, check_seed
from .spectrum import ELL_MAX, SpectrumQuery, spectrum_table
from .sphere_sim import SphereSet, run_correlation_experiment, run_sharpness_check, \
    run_sphere_experiment
from .torus_sim import TorusConfig, eigen_check, random_half_set, run_torus_experiment

__all__ = ["main", "build_parser", "emit_report", "render_report"]

OUTPUT_DIR_ENV = "RADON_SAMPLING_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, ExperimentReport):
        return _jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _rows_csv(rows):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def render_report(report, fmt):
    """Serialize a report to text.

    ``ExperimentReport`` renders as its histogram in CSV; a list of flat
    rows or a flat dict renders as a CSV table.  JSON always uses sorted keys.
    """
    if fmt == "json":
        return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ConfigError(f"unknown format {fmt!r}")
    if isinstance(report, ExperimentReport):
        return report.histogram_csv()
    rows = [report] if isinstance(report, dict) else list(report)
    if not rows or any(isinstance(v, (dict, list)) for r in rows for v in r.values()):
        raise ConfigError("this report has no tabular form; use --format json")
    return _rows_csv(rows)


def emit_report(report, fmt, path=None):
    """Write ``report`` to ``path`` (stdout when None); output is deterministic."""
    text = render_report(report, fmt)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write report to {path}: {exc.strerror}") from exc


def _resolve_path(args):
    if args.out:
        return args.out
    root = os.environ.get(OUTPUT_DIR_ENV)
    if root:
        return os.path.join(root, f"{args.command}.{args.format}")
    return None


def _check_format(args):
    if args.format != "csv":
        return
    if args.command == "convex" and args.mode == "tails":
        raise ConfigError("tail checks have no tabular form; use --format json")
    if args.command == "torus" and args.check_spectrum:
        raise ConfigError("--check-spectrum adds a list field; use --format json")


def _check_writable(path):
    if path is None:
        return
    parent = os.path.dirname(os.path.abspath(path)) or "."
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise ConfigError(f"output directory {parent} does not exist or is not writable")


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def _check_run(args):
    _require(args.samples >= 1, f"--samples must be >= 1, got {args.samples}")
    _require(args.workers >= 1, f"--workers must be >= 1, got {args.workers}")
    check_seed(args.seed)


def _cmd_spectrum(args):
    SpectrumQuery(args.n, args.k, 0)
    _require(0 <= args.lmax <= ELL_MAX, f"--lmax must lie in [0, {ELL_MAX}]")
    return spectrum_table(args.n, args.k, args.lmax)


def _cmd_sphere(args):
    _check_run(args)
    SpectrumQuery(args.n, args.k, 0)
    _require(0.0 < args.measure < 1.0 or args.set == "hemisphere",
             f"--measure must lie in (0, 1), got {args.measure}")
    _require(args.model == "subspace" or args.k == 2, "--model tangent needs --k 2")
    sset = SphereSet.with_measure(args.set, args.n, args.measure)
    return run_sphere_experiment(args.n, args.k, sset, args.samples, args.seed,
                                 bins=args.bins, workers=args.workers, model=args.model)


def _cmd_convex(args):
    _check_run(args)
    body = make_isotropic_body(args.body, args.n)
    xi = None
    if args.xi_axis is not None:
        _require(0 <= args.xi_axis < args.n, f"--xi-axis must lie in [0, {args.n})")
        xi = np.zeros(args.n)
        xi[args.xi_axis] = 1.0
    if args.mode == "tails":
        return run_tail_checks(body, args.samples, args.seed, xi=xi, workers=args.workers)
    return run_zero_one_experiment(body, args.samples, args.seed, xi=xi,
                                   workers=args.workers, bins=args.bins)


def _cmd_torus(args):
    check_seed(args.seed)
    _require(args.workers >= 1, f"--workers must be >= 1, got {args.workers}")
    cfg = TorusConfig(args.p, args.n)
    if args.mode == "sampled":
        _require(args.count is not None and args.count >= 1, "sampled mode needs --count >= 1")
    else:
        cfg.check_budget("exhaustive sweep")
    if args.check_spectrum:
        cfg.check_character_budget()
    mask = random_half_set(cfg, args.seed)
    report = run_torus_experiment(cfg, mask, mode=args.mode, count=args.count,
                                  seed=args.seed, workers=args.workers)
    if args.check_spectrum:
        rows = eigen_check(cfg, exact=True)
        report["spectrum_ratios"] = sorted({str(r["ratio"]) for r in rows})
    return report


def _cmd_ellipse(args):
    _check_run(args)
    _require(args.n >= 1, f"--n must be >= 1, got {args.n}")
    _require(args.points >= 2, f"--points must be >= 2, got {args.points}")
    return run_ellipse_experiment(args.n, args.samples, args.seed, points=args.points,
                                  workers=args.workers, bins=args.bins)


def _cmd_correlation(args):
    _check_run(args)
    _require(args.n >= 4 and 2 <= args.k <= args.n - 2,
             f"need 2 <= k <= n-2, got n={args.n}, k={args.k}")
    return run_correlation_experiment(args.n, args.k, args.samples, args.seed,
                                      workers=args.workers, test_function=args.test_function)


def _cmd_sharpness(args):
    _check_run(args)
    _require(all(n >= 4 for n in args.dims), "every --dims entry must be >= 4")
    return run_sharpness_check(args.dims, args.samples, args.seed, workers=args.workers)


def build_parser():
    parser = _Parser(prog="radon-sampling",
                     description="Radon-transform spectra and intersection-sampling experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, seeded=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        if seeded:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--workers", type=int, default=1)
        return p

    p = add("spectrum", _cmd_spectrum, "eigenvalue table for S_k", seeded=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lmax", type=int, default=10, help="largest half degree")

    p = add("sphere", _cmd_sphere, "random sections of a test set on the sphere")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--set", choices=("band", "central_band", "hemisphere"), default="band")
    p.add_argument("--measure", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=60)
    p.add_argument("--model", choices=("subspace", "tangent"), default="subspace")

    p = add("convex", _cmd_convex, "hit-and-run lines against a half-volume slab")
    p.add_argument("--body", choices=("ball", "cube", "simplex"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("zero-one", "tails"), default="zero-one")
    p.add_argument("--xi-axis", type=int, default=None, help="slab normal e_i (default e_0)")
    p.add_argument("--samples", type=int, default=3000)
    p.add_argument("--bins", type=int, default=60)

    p = add("torus", _cmd_torus, "arithmetic progressions on (Z/pZ)^n")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--count", type=int, default=None, help="progressions in sampled mode")
    p.add_argument("--check-spectrum", action="store_true",
                   help="also verify the eigenvalues of S exactly")

    p = add("ellipse", _cmd_ellipse, "random ellipses in the simplex")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--bins", type=int, default=60)

    p = add("correlation", _cmd_correlation, "subspace against orthogonal complement")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--test-function", choices=("x1sq", "constant"), default="x1sq")

    p = add("sharpness", _cmd_sharpness, "probability that a geodesic misses the band")
    p.add_argument("--dims", type=int, nargs="+", default=[100, 1000])
    p.add_argument("--samples", type=int, default=100_000)
    return parser


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        path = _resolve_path(args)
        _check_format(args)
        _check_writable(path)
        report = args.func(args)
        emit_report(report, args.format, path)
    except (ConfigError, DomainError) as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except NumericalError as exc:
        return _fail("numeric", str(exc), EXIT_NUMERIC)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
