"""Command-line entry point: ``g2haar <command> [options]``.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage error.
Reports are JSON objects, one per line (or CSV with ``--format csv``).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from g2haar import __version__
from g2haar.algebra import BACKENDS, BackendError, get_backend
from g2haar.checks import DEFAULT_TOLERANCES, verify_suite
from g2haar.measure import (
    TEST_FUNCTIONS,
    NonFiniteIntegrandError,
    analytic_volume,
    density_vs_metric,
    g2_density,
    haar_coordinates,
    invariance_suite,
    mc_integrate,
    moments,
    numeric_volume,
    su3_density,
)
from g2haar.parametrization import COORDINATE_NAMES, g2_element

SAMPLE_FORMAT = "g2-haar/1"
SEED_ENV = "G2_HAAR_SEED"
MAX_SEED = 2**64 - 1


class UsageError(Exception):
    pass


def _seed(value: str) -> int:
    try:
        seed = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {value!r}")
    if not 0 <= seed <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return seed


def _positive(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid count {value!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("count must be positive")
    return n


def _tolerance(value: str) -> tuple[str, float]:
    key, sep, val = value.partition("=")
    if not sep or key not in DEFAULT_TOLERANCES:
        raise argparse.ArgumentTypeError(
            f"expected KEY=VAL with KEY in {sorted(DEFAULT_TOLERANCES)}, got {value!r}")
    try:
        return key, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid tolerance value {val!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=BACKENDS, default="adjoint")
    common.add_argument("--seed", type=_seed, default=None,
                        help=f"RNG seed (default: ${SEED_ENV} or 0)")
    common.add_argument("-n", "--samples", type=_positive, default=None)
    common.add_argument("--points", type=_positive, default=50)
    common.add_argument("--step", type=float, default=1e-6, help="finite-difference step")
    common.add_argument("--tolerance", type=_tolerance, action="append", default=[],
                        metavar="KEY=VAL")
    common.add_argument("--output", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--emit-matrix", action="store_true")
    common.add_argument("--workers", type=_positive, default=1)

    parser = argparse.ArgumentParser(prog="g2haar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"g2haar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="algebra and geometry checks")
    sub.add_parser("sample", parents=[common], help="write Haar samples")
    p = sub.add_parser("integrate", parents=[common], help="Monte Carlo average of a test function")
    p.add_argument("--function", choices=sorted(TEST_FUNCTIONS), default="trace")
    sub.add_parser("moments", parents=[common], help="character moment tests")
    sub.add_parser("invariance", parents=[common], help="left/right translation tests")
    sub.add_parser("volume", parents=[common], help="analytic vs quadrature volumes")
    sub.add_parser("metric-check", parents=[common], help="measure density vs metric determinant")
    return parser


def _fmt(x):
    if isinstance(x, (np.floating, float)):
        return repr(float(x))
    return str(x)


class Reporter:
    """Writes report rows as JSON lines or CSV."""

    def __init__(self, stream, fmt: str):
        self.stream = stream
        self.fmt = fmt
        self.columns = None

    def row(self, record: dict):
        if self.fmt == "json":
            self.stream.write(json.dumps(record, default=_jsonable) + "\n")
        else:
            if self.columns is None or list(record) != self.columns:
                self.columns = list(record)
                self.stream.write(",".join(self.columns) + "\n")
            self.stream.write(",".join(_fmt(v) for v in record.values()) + "\n")
        self.stream.flush()


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


def _tolerances(args) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(dict(args.tolerance))
    return tol


def cmd_verify(args, out: Reporter) -> int:
    results = verify_suite(args.backend, args.seed, args.step, _tolerances(args))
    for r in results:
        out.row(r.as_dict())
    return 0 if all(r.passed for r in results) else 1


def cmd_sample(args, stream) -> int:
    n = args.samples or 1
    x = haar_coordinates(n, args.seed)
    dens = g2_density(x)
    mats = g2_element(x, args.backend).reshape(n, -1) if args.emit_matrix else None
    header = {"format": SAMPLE_FORMAT, "backend": args.backend, "seed": args.seed, "n": n,
              "version": __version__}
    if args.format == "json":
        stream.write(json.dumps(header) + "\n")
        for i in range(n):
            rec = {"alpha": x[i, :6].tolist(), "gamma": x[i, 6:].tolist(), "density": float(dens[i])}
            if mats is not None:
                rec["matrix"] = mats[i].tolist()
            stream.write(json.dumps(rec) + "\n")
    else:
        stream.write("# " + json.dumps(header) + "\n")
        w = csv.writer(stream, lineterminator="\n")
        cols = list(COORDINATE_NAMES) + ["density"]
        if mats is not None:
            cols += [f"m{k}" for k in range(mats.shape[1])]
        w.writerow(cols)
        for i in range(n):
            vals = list(x[i]) + [dens[i]] + (list(mats[i]) if mats is not None else [])
            w.writerow([repr(float(v)) for v in vals])
    stream.flush()
    return 0


def cmd_integrate(args, out: Reporter) -> int:
    n = args.samples or 100_000
    est = mc_integrate(TEST_FUNCTIONS[args.function], n, args.seed, args.backend, args.workers)
    out.row({"function": args.function, "backend": args.backend, **est.as_dict()})
    return 0


def cmd_moments(args, out: Reporter) -> int:
    n = args.samples or 100_000
    sig = _tolerances(args)["moments_sigma"]
    res = moments(n, args.seed, args.backend, args.workers, sig)
    for key, expected, z in (("trace", 0.0, res["z_trace"]),
                             ("trace_squared", 1.0, res["z_trace_squared"])):
        est = res[key]
        out.row({"moment": key, "backend": args.backend, "expected": expected, **est.as_dict(),
                 "z": z, "pass": abs(z) <= sig})
    return 0 if res["pass"] else 1


def cmd_invariance(args, out: Reporter) -> int:
    n = args.samples or 100_000
    zmax = _tolerances(args)["invariance_z"]
    res = invariance_suite(n=n, seed=args.seed, backend=args.backend, workers=args.workers, z_max=zmax)
    for r in res["rows"]:
        out.row({**r, "pass": abs(r["z"]) <= zmax})
    return 0 if res["pass"] else 1


def cmd_volume(args, out: Reporter) -> int:
    tol = _tolerances(args)["volume"]
    vol = analytic_volume()
    num_g2 = numeric_volume()
    num_su3 = numeric_volume(su3_density, coords=slice(6, 14))
    closed_ratio = 9 * math.pi**3 / 10
    closed_su3 = math.sqrt(3) * math.pi**5
    normalization = num_g2 / vol["V_G2"]
    ratio_err = abs(vol["ratio"] - closed_ratio) / closed_ratio
    ok = ratio_err <= tol and abs(normalization - 1.0) <= tol
    out.row({"V_SU3": vol["V_SU3"], "V_G2": vol["V_G2"], "ratio": vol["ratio"],
             "ratio_closed_form": closed_ratio, "V_SU3_closed_form": closed_su3,
             "V_G2_tensor_quadrature": num_g2, "V_SU3_tensor_quadrature": num_su3,
             "normalization": normalization, "ratio_rel_error": ratio_err, "pass": ok})
    return 0 if ok else 1


def cmd_metric_check(args, out: Reporter) -> int:
    tol = _tolerances(args)["metric_spread"]
    res = density_vs_metric(args.points, args.seed, args.step, args.backend, tol)
    out.row({"fitted_constant": res["ratio_mean"], "ratio_spread": res["ratio_spread"],
             "points": res["points"], "expected_constant": 1.0,
             "constant_is_one": res["constant_is_one"], "pass": res["pass"]})
    if not res["constant_is_one"]:
        print(f"note: sqrt(det metric) / density = {res['ratio_mean']:.12g}, not 1",
              file=sys.stderr)
    return 0 if res["pass"] else 1


COMMANDS = {
    "verify": cmd_verify,
    "integrate": cmd_integrate,
    "moments": cmd_moments,
    "invariance": cmd_invariance,
    "volume": cmd_volume,
    "metric-check": cmd_metric_check,
}


def _resolve_seed(args):
    if args.seed is not None:
        return
    env = os.environ.get(SEED_ENV)
    if env is None:
        args.seed = 0
        return
    try:
        args.seed = _seed(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{SEED_ENV}: {exc}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _resolve_seed(args)
        if not 1e-7 <= args.step <= 1e-4:
            raise UsageError(f"--step {args.step} outside [1e-7, 1e-4]")
        if args.command in ("integrate", "moments", "invariance") and args.samples == 1:
            raise UsageError("need at least 2 samples")
    except UsageError as exc:
        print(f"g2haar: error: {exc}", file=sys.stderr)
        return 2

    try:
        stream = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
    except OSError as exc:
        print(f"g2haar: error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "sample":
            return cmd_sample(args, stream)
        get_backend(args.backend)
        return COMMANDS[args.command](args, Reporter(stream, args.format))
    except (BackendError, NonFiniteIntegrandError) as exc:
        print(f"g2haar: {exc}", file=sys.stderr)
        return 1
    finally:
        if args.output:
            stream.close()


if __name__ == "__main__":
    sys.exit(main())
