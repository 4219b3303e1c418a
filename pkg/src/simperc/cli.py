"""Command-line front end.

Lengths are in one user-chosen unit and densities in that unit to the power
-2; nothing is converted.  Any long flag may also be given in a key-value
file passed with ``--config`` (``key = value`` per line, ``#`` comments);
flags on the command line win over the file.

Exit status: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import shlex
import sys

from . import __version__, bounds, experiments
from .model import Direction, HeteroParams
from .pointprocess import SeededStream, Window

SEED_ENV = "SIMPERC_SEED"

# execution settings that do not change results, kept out of embedded configs
_NOT_CONFIG = {"threads", "output", "config", "handler"}


class ConfigError(ValueError):
    pass


def _positive(name):
    def conv(text):
        v = float(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return v

    return conv


def _nonneg(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _count(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _threads(text):
    if text == "auto":
        return os.cpu_count() or 1
    return _count(text)


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _add_common(p, trials_default=200):
    p.add_argument("--trials", type=_count, default=trials_default)
    p.add_argument("--seed", type=int, default=None, help=f"master seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--threads", type=_threads, default=1, help="worker threads, or 'auto'")
    p.add_argument("--output", help="also write the result to this file")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_serial_threads(p):
    p.add_argument("--threads", type=_threads, default=1, help="accepted for uniformity; this command is serial")


def _add_model(p, densities=True, df=True):
    p.add_argument("--dt", type=_positive("--dt"), required=True, help="primary range D_t")
    p.add_argument("--dtt", type=_positive("--dtt"), required=True, help="secondary range d_t")
    if df:
        p.add_argument("--df", type=_nonneg, required=True, help="guard radius D_f")
    if densities:
        p.add_argument("--lambda-p", type=_nonneg, required=True)
        p.add_argument("--lambda-s", type=_nonneg, required=True)


def _add_window(p):
    p.add_argument("--window", type=_positive("--window"), required=True, help="window width")
    p.add_argument("--window-height", type=_positive("--window-height"), default=None,
                   help="window height (default: same as width)")
    p.add_argument("--direction", choices=("L-R", "T-B"), default="L-R")


def _add_critical(p):
    p.add_argument("--lambda-c1", type=_positive("--lambda-c1"), default=bounds.DEFAULT_CRITICAL.lambda_c_unit,
                   help="critical density for unit connection distance")
    p.add_argument("--p8", type=float, default=bounds.P8_SITE, help="8-neighbour site threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simperc",
        description="Simultaneous percolation of a primary and a guard-zone-limited secondary disk network.",
        epilog=f"The default master seed can be set with the {SEED_ENV} environment variable.",
    )
    parser.add_argument("--version", action="version", version=f"simperc {__version__}")
    parser.add_argument("--config", help="key = value file supplying any long flag")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("percolate", help="crossing probabilities of both networks")
    _add_model(p)
    _add_window(p)
    _add_common(p)
    p.set_defaults(handler=cmd_percolate)

    p = sub.add_parser("bounds", help="evaluate every analytic bound at one point")
    _add_model(p)
    _add_critical(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output")
    _add_serial_threads(p)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("sweep", help="(lambda_p, lambda_s) phase diagram with bound overlay")
    _add_model(p, densities=False)
    _add_window(p)
    for axis in ("lp", "ls"):
        p.add_argument(f"--{axis}-min", type=_nonneg, required=True)
        p.add_argument(f"--{axis}-max", type=_nonneg, required=True)
        p.add_argument(f"--{axis}-steps", type=_count, required=True)
    _add_critical(p)
    _add_common(p)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("lambda-c", help="estimate the critical density by crossing bisection")
    p.add_argument("--diameter", type=_positive("--diameter"), default=1.0)
    p.add_argument("--heights", type=_positive("--heights"), nargs="+", default=None,
                   help="window heights (default: 20 and 40 diameters)")
    p.add_argument("--criterion", choices=("mean", "long"), default="mean")
    p.add_argument("--rel-tol", type=_positive("--rel-tol"), default=2e-3)
    _add_common(p)
    p.set_defaults(handler=cmd_lambda_c)

    p = sub.add_parser("pdf-check", help="pair-distance density vs simulation")
    p.add_argument("--ell", type=_positive("--ell"), nargs="+", default=[1.0])
    p.add_argument("--samples", type=_count, default=1_000_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_serial_threads(p)
    p.set_defaults(handler=cmd_pdf_check)

    p = sub.add_parser("guardzone", help="certify a positive guard radius via the bond discretization")
    _add_model(p, df=False)
    p.add_argument("--validate-window", type=_positive("--validate-window"), default=None,
                   help="if given, rerun simultaneous crossings at the certified D_f on this square window")
    p.add_argument("--validate-trials", type=_count, default=200)
    _add_critical(p)
    _add_common(p, trials_default=20000)
    p.set_defaults(handler=cmd_guardzone)
    return parser


# --- config files -----------------------------------------------------------


def read_config(path: str) -> list[str]:
    """Translate a key-value file into long-flag arguments."""
    args = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("_", "-")
        if key == "command":
            raise ConfigError(f"{path}:{n}: give the command on the command line")
        args.append("--" + key)
        args.extend(shlex.split(value))
    return args


def _splice_config(argv: list[str]) -> list[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return rest
    extra = read_config(known.config)
    for i, tok in enumerate(rest):
        if not tok.startswith("-"):
            return rest[: i + 1] + extra + rest[i + 1:]
    return rest + extra


# --- output -----------------------------------------------------------------


def _cell(v):
    if v is None:
        return "not-applicable"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def _jsonable(v):
    if v is None:
        return "not-applicable"
    if isinstance(v, float) and not math.isfinite(v):
        return _cell(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(command: str, config: dict, seed, rows: list[dict], fmt: str) -> str:
    meta = {"tool": "simperc", "version": __version__, "command": command, "master_seed": seed}
    if fmt == "json":
        doc = dict(meta, config=_jsonable(config), rows=_jsonable(rows))
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    cols = list(rows[0]) if rows else []
    for r in rows[1:]:
        cols += [k for k in r if k not in cols]
    w.writerow(cols + ["tool", "version", "command", "master_seed", "config"])
    cfg = json.dumps(_jsonable(config), sort_keys=True, allow_nan=False)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols] + ["simperc", __version__, command, _cell(seed), cfg])
    return buf.getvalue()


def _config_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}


def _emit(args, rows):
    text = render(args.command, _config_of(args), getattr(args, "seed", None), rows, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def _window(args) -> Window:
    return Window.from_size(args.window, args.window_height)


def _critical(args):
    return bounds.CriticalConstant(args.lambda_c1, "command line")


def _stream(args) -> SeededStream:
    if args.seed is None:
        args.seed = _default_seed()
    try:
        return SeededStream(args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# --- commands ---------------------------------------------------------------


def cmd_percolate(args) -> int:
    stream = _stream(args)
    params = HeteroParams(args.dt, args.dtt, args.df, args.lambda_p, args.lambda_s, _window(args))
    est = experiments.estimate_simultaneous(params, args.trials, stream, args.direction, args.threads)
    rows = [
        {"network": k, "direction": e.direction, "probability": e.probability,
         "successes": e.successes, "trials": e.trials, "half_width_95": e.half_width_95}
        for k, e in est.items()
    ]
    return _emit(args, rows)


def cmd_bounds(args) -> int:
    if not 0 < args.p8 < 1:
        raise ConfigError("--p8 must lie in (0, 1)")
    params = HeteroParams(args.dt, args.dtt, args.df, args.lambda_p, args.lambda_s, Window.from_size(1.0))
    rep = bounds.bound_report(params, _critical(args), args.p8)
    return _emit(args, [rep.as_dict()])


def _axis(lo, hi, steps):
    if hi < lo:
        raise ConfigError("axis max must not be below min")
    if steps == 1:
        return [lo]
    return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


def cmd_sweep(args) -> int:
    if not 0 < args.p8 < 1:
        raise ConfigError("--p8 must lie in (0, 1)")
    stream = _stream(args)
    res = experiments.phase_diagram(
        args.dt, args.dtt, args.df,
        _axis(args.lp_min, args.lp_max, args.lp_steps),
        _axis(args.ls_min, args.ls_max, args.ls_steps),
        _window(args), args.trials, stream,
        direction=args.direction, threads=args.threads,
        critical=_critical(args), p8=args.p8,
    )
    return _emit(args, res.rows())


def cmd_lambda_c(args) -> int:
    stream = _stream(args)
    if args.heights is None:
        args.heights = [20.0 * args.diameter, 40.0 * args.diameter]
    if len(args.heights) < 2:
        raise ConfigError("--heights needs at least two values")
    est = experiments.estimate_lambda_c(
        args.diameter, args.heights, args.trials, stream,
        criterion=args.criterion, rel_tol=args.rel_tol, threads=args.threads,
    )
    top = max(est.heights)
    rows = [
        {"diameter": est.diameter, "height": h, "estimate": e, "ci_low": lo, "ci_high": hi,
         "selected": h == top, "heights_consistent": est.heights_consistent}
        for h, e, lo, hi in est.per_height
    ]
    return _emit(args, rows)


def cmd_pdf_check(args) -> int:
    stream = _stream(args)
    rows = []
    for i, ell in enumerate(args.ell):
        r = experiments.pdf_check(ell, args.samples, stream.child(i))
        rows.append({"ell": r.side, "samples": r.samples, "ks_statistic": r.ks_statistic,
                     "normalization_residual": r.normalization_residual, "seam_gap": r.seam_gap})
    return _emit(args, rows)


def cmd_guardzone(args) -> int:
    stream = _stream(args)
    try:
        cert = experiments.guard_zone_search(
            args.lambda_p, args.lambda_s, args.dt, args.dtt, args.trials, stream.child(0),
            threads=args.threads, critical=_critical(args),
        )
        status = 0
    except experiments.GuardZoneSearchFailed as exc:
        print(f"simperc: {exc}", file=sys.stderr)
        cert, status = exc.certificate, 3
    row = {k: v for k, v in vars(cert).items() if k not in ("ell_history", "notes")}
    row["ell_history"] = json.dumps(_jsonable(cert.ell_history))
    row["notes"] = "; ".join(cert.notes)
    if status == 0 and args.validate_window:
        params = HeteroParams(args.dt, args.dtt, cert.D_f, args.lambda_p, args.lambda_s,
                              Window.from_size(args.validate_window))
        est = experiments.estimate_simultaneous(params, args.validate_trials, stream.child(1),
                                                threads=args.threads)
        for k, e in est.items():
            row[f"validate_p_{k}"] = e.probability
    _emit(args, [row])
    return status


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_splice_config(argv))
    except ConfigError as exc:
        print(f"simperc: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (ConfigError, ValueError) as exc:
        print(f"simperc: configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"simperc: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
