"""Command-line front end.

Every command writes a '#'-prefixed metadata header echoing its fully
resolved configuration (defaults expanded), so the output is reproducible
from its own header.  --threads changes execution only, never results, and
is deliberately left out of the echo.

Exit codes: 0 success, 1 verification failure, 2 usage/validation error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .inversion import InversionConfig, cdf_from_density, density_curve
from .simulate import SampleSet, SimConfig, sample_hitting_times
from .transforms import BesselSpec, Boundary, mellin_transform
from .verify import reports_to_json, reports_to_text, run_all

__all__ = ["CliConfig", "main"]

_EXIT_OK = 0
_EXIT_VERIFY_FAILED = 1
_EXIT_USAGE = 2
_EXIT_NUMERICAL = 3


@dataclass(frozen=True)
class CliConfig:
    """Fully resolved invocation: what ran, with which parameters, where to."""

    subcommand: str
    params: dict
    output: str | None
    fmt: str
    seed: int | None
    verbosity: int

    def header_lines(self) -> list[str]:
        lines = [f"# command: {self.subcommand}"]
        for key in sorted(self.params):
            lines.append(f"# {key}: {self.params[key]!r}")
        return lines


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _note(cfg: CliConfig, msg: str) -> None:
    if cfg.verbosity > 0:
        print(msg, file=sys.stderr)


def _spec(args) -> BesselSpec:
    return BesselSpec(args.nu, -1 if args.index == "neg" else 1)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rootbound",
        description="First hitting time of a square-root boundary by a "
                    "Bessel process: closed-form Mellin transforms, numeric "
                    "densities, simulation, and identity verification.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="subcommand", required=True)

    t = sub.add_parser("transform", help="evaluate E[(b+sigma)^(-s)]")
    t.add_argument("--index", choices=("neg", "pos"), required=True)
    t.add_argument("--nu", type=float, required=True)
    t.add_argument("--b", type=float, required=True)
    t.add_argument("--c", type=float, required=True)
    t.add_argument("--s", type=float, action="append", required=True,
                   help="transform argument, repeatable")
    t.add_argument("--output", default=None)

    d = sub.add_parser("density", help="invert the transform to y,pdf,cdf")
    d.add_argument("--index", choices=("neg", "pos"), required=True)
    d.add_argument("--nu", type=float, required=True)
    d.add_argument("--b", type=float, required=True)
    d.add_argument("--c", type=float, required=True)
    d.add_argument("--ymin", type=float, default=None)
    d.add_argument("--ymax", type=float, default=None)
    d.add_argument("--points", type=int, default=512)
    d.add_argument("--abscissa", type=float, default=InversionConfig.contour_abscissa)
    d.add_argument("--half-height", type=float, default=InversionConfig.half_height)
    d.add_argument("--step", type=float, default=InversionConfig.step)
    d.add_argument("--tail-tol", type=float, default=InversionConfig.tail_tol)
    d.add_argument("--threads", type=int, default=1)
    d.add_argument("--output", default=None)

    s = sub.add_parser("simulate", help="sample crossing times")
    s.add_argument("--index", choices=("neg", "pos"), default="neg")
    s.add_argument("--nu", type=float, required=True)
    s.add_argument("--b", type=float, required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--paths", type=int, required=True)
    s.add_argument("--dt", type=float, default=1e-4)
    s.add_argument("--max-bm-time", type=float, default=50.0)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--stream-id", type=int, default=0)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--output", default=None)

    v = sub.add_parser("verify", help="run identity checks")
    v.add_argument("--check", required=True,
                   choices=("dufresne", "affine", "transform-mc", "duality",
                            "whittaker", "inversion", "all"))
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--threads", type=int, default=1)
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--output", default=None)
    return p


def _cmd_transform(args) -> int:
    spec = _spec(args)
    bnd = Boundary(args.b, args.c)
    cfg = CliConfig("transform",
                    {"index": args.index, "nu": args.nu, "b": args.b,
                     "c": args.c, "s": list(args.s)},
                    args.output, "csv", None, args.verbose)
    rows = []
    for s in args.s:
        value = mellin_transform(spec, bnd, float(s))
        rows.append(f"{float(s)!r},{float(value)!r}")
    text = "\n".join(cfg.header_lines() + ["s,value"] + rows) + "\n"
    _emit(text, args.output)
    return _EXIT_OK


def _cmd_density(args) -> int:
    spec = _spec(args)
    bnd = Boundary(args.b, args.c)
    if (args.ymin is None) != (args.ymax is None):
        raise DomainError("give both --ymin and --ymax, or neither")
    icfg = InversionConfig(contour_abscissa=args.abscissa,
                           half_height=args.half_height, step=args.step,
                           tail_tol=args.tail_tol)
    grid = None
    if args.ymin is not None:
        grid = np.geomspace(args.ymin, args.ymax, args.points)
    cfg = CliConfig("density",
                    {"index": args.index, "nu": args.nu, "b": args.b,
                     "c": args.c, "ymin": args.ymin, "ymax": args.ymax,
                     "points": args.points, "abscissa": args.abscissa,
                     "half_height": args.half_height, "step": args.step,
                     "tail_tol": args.tail_tol},
                    args.output, "csv", None, args.verbose)
    _note(cfg, "building contour table (the expensive step)...")
    curve = density_curve(spec, bnd, grid=grid, icfg=icfg, points=args.points,
                          threads=args.threads)
    cdf = cdf_from_density(curve)
    lines = cfg.header_lines()
    lines.append(f"# resolved_ymin: {float(curve.grid[0])!r}")
    lines.append(f"# resolved_ymax: {float(curve.grid[-1])!r}")
    lines.append(f"# mass: {cdf.mass!r}")
    lines.append(f"# truncation_error: {curve.truncation_error!r}")
    lines.append("y,pdf,cdf")
    for y, f, big_f in zip(curve.grid, curve.values, cdf.values):
        lines.append(f"{float(y)!r},{float(f)!r},{float(big_f)!r}")
    _emit("\n".join(lines) + "\n", args.output)
    return _EXIT_OK


def _cmd_simulate(args) -> int:
    spec = _spec(args)
    bnd = Boundary(args.b, args.c)
    sim = SimConfig(n_paths=args.paths, seed=args.seed, dt=args.dt,
                    max_bm_time=args.max_bm_time, stream_id=args.stream_id)
    cfg = CliConfig("simulate",
                    {"index": args.index, "nu": args.nu, "b": args.b,
                     "c": args.c, "paths": args.paths, "dt": args.dt,
                     "max_bm_time": args.max_bm_time, "seed": args.seed,
                     "stream_id": args.stream_id},
                    args.output, "csv", args.seed, args.verbose)
    hits = sample_hitting_times(spec, bnd, sim, threads=args.threads)
    sigma = hits.valid_sigma
    y = bnd.b + sigma
    moments = {}
    for s in (0.5, 1.0, 2.0):
        w = y ** (-s)
        moments[repr(s)] = {
            "estimate": float(w.mean()),
            "se": float(w.std(ddof=1)) / math.sqrt(w.size),
        }
    summary = {
        "n_requested": args.paths,
        "n_crossed": int(sigma.size),
        "excluded_fraction": hits.excluded_fraction,
        "median_sigma": float(np.median(sigma)),
        "transform_moments": moments,
    }
    sset = SampleSet(sigma, "hitting_sigma", args.seed, args.paths, sigma.size)
    lines = cfg.header_lines()
    lines.append(f"# summary: {json.dumps(summary, sort_keys=True)}")
    text = "\n".join(lines) + "\n" + sset.to_csv()
    _emit(text, args.output)
    return _EXIT_OK


def _cmd_verify(args) -> int:
    checks = None if args.check == "all" else [args.check]
    reports = run_all(args.seed, threads=args.threads, checks=checks)
    if args.format == "json":
        _emit(reports_to_json(reports), args.output)
    else:
        _emit(reports_to_text(reports), args.output)
    return _EXIT_OK if all(r.passed for r in reports) else _EXIT_VERIFY_FAILED


_COMMANDS = {
    "transform": _cmd_transform,
    "density": _cmd_density,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
