"""Command line: ``slicepi verify | project | norm | kernel-eval``.

Exit codes: 0 success, 1 a check or validation failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import validate_well_defined, worst_antipodal_pair
from .io import FormatError, dumps_slice, read_sampled, write_sampled
from .norms import extremal_function, lp_norm, norm_lower_bound_search, ratio, slice_lp_norm, upper_bound_constant
from .projection import interior_slice, project_boundary, project_fourier, slice_kernel
from .slices import slice_defect
from .verify import DEFAULT_TOLERANCES, RunConfig, run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
NAMED_UNITS = {"i": (1.0, 0.0, 0.0), "j": (0.0, 1.0, 0.0), "k": (0.0, 0.0, 1.0)}


class UsageError(Exception):
    pass


def fmt(v) -> str:
    """9 significant digits."""
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.9g}"


def parse_unit(text: str) -> np.ndarray:
    text = text.strip().lower()
    sign = -1.0 if text.startswith("-") and text[1:] in NAMED_UNITS else 1.0
    if text.lstrip("-") in NAMED_UNITS:
        return sign * np.array(NAMED_UNITS[text.lstrip("-")])
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"cannot parse imaginary unit {text!r}") from exc
    if v.shape != (3,) or not np.isclose(np.linalg.norm(v), 1.0, atol=1e-9):
        raise UsageError(f"imaginary unit must be x,y,z with modulus 1, got {text!r}")
    return v / np.linalg.norm(v)


def parse_exponent(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        p = float(text)
    except ValueError as exc:
        raise UsageError(f"cannot parse exponent {text!r}") from exc
    if p < 1:
        raise UsageError("exponent must be >= 1")
    return p


def _tolerances(items) -> dict:
    out = {}
    for item in items or []:
        name, _, val = item.partition("=")
        if name not in DEFAULT_TOLERANCES or not val:
            raise UsageError(f"unknown tolerance override {item!r}; names: {', '.join(DEFAULT_TOLERANCES)}")
        out[name] = float(val)
    return out


def config_from_args(args) -> RunConfig:
    try:
        cfg = RunConfig(args.n_polar, args.n_azimuth, args.nt, args.rule, args.seed, _tolerances(args.tol))
        cfg.grid()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return cfg


def provenance(cfg: RunConfig) -> dict:
    return {"version": __version__, "config": cfg.describe()}


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    cfg = config_from_args(args)
    rows = run_checks(cfg)
    ok = all(r.passed for r in rows)
    if args.json:
        doc = {**provenance(cfg), "passed": ok, "checks": [r.as_dict() for r in rows]}
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.output)
    else:
        header = f"{'check':<40} {'expected':>16} {'computed':>16} {'error':>16} {'tol':>10}  status"
        lines = [header, "-" * len(header)]
        for r in rows:
            lines.append(
                f"{r.name:<40} {fmt(r.expected):>16} {fmt(r.computed):>16} {fmt(r.error):>16} {fmt(r.tol):>10}  {'PASS' if r.passed else 'FAIL'}"
            )
        lines.append(f"{sum(r.passed for r in rows)}/{len(rows)} checks passed")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_project(args) -> int:
    cfg = config_from_args(args)
    try:
        phi = read_sampled(args.input)
    except (OSError, FormatError) as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    tol = cfg.tolerances.get("well_defined", args.well_defined_tol)
    defect = validate_well_defined(phi)
    if defect > tol and not args.force:
        m, k, d = worst_antipodal_pair(phi)
        rule = phi.grid.sphere
        anti = int(rule.antipode[m])
        print(
            f"error: input is not a function on the boundary: defect {fmt(d)} > {fmt(tol)} "
            f"at (polar_idx={rule.polar_idx[m]}, azimuth_idx={rule.azimuth_idx[m]}, t_idx={k}) vs "
            f"(polar_idx={rule.polar_idx[anti]}, azimuth_idx={rule.azimuth_idx[anti]}, "
            f"t_idx={phi.grid.circle.reflect[k]}); pass --force to project anyway",
            file=sys.stderr,
        )
        return EXIT_FAIL
    if args.route == "fourier":
        out = project_fourier(phi)
    elif args.route == "boundary":
        out = project_boundary(phi)
    else:
        if args.r is None or not 0.0 <= args.r < 1.0:
            raise UsageError("route 'interior' needs --r in [0, 1)")
        out = interior_slice(phi, args.r)
    grid = phi.grid
    summary = {
        "route": args.route,
        "r": args.r,
        "input": str(args.input),
        "grid": grid.describe(),
        "well_defined_defect": defect,
        "slice_defect_before": slice_defect(phi),
        "slice_defect_after": slice_defect(out.on_grid(grid)),
        "l2_before": lp_norm(phi, 2.0),
        "l2_after": slice_lp_norm(out, grid, 2.0),
        "seed": cfg.seed,
        "version": __version__,
    }
    meta = {"route": args.route, "r": args.r, "seed": cfg.seed, "source_grid": grid.describe()}
    _emit(dumps_slice(out, meta), args.output)
    text = json.dumps({k: (fmt(v) if isinstance(v, float) else v) for k, v in summary.items()}, sort_keys=True)
    if args.summary:
        Path(args.summary).write_text(text + "\n")
    else:
        print(text, file=sys.stderr)
    return EXIT_OK


def cmd_norm(args) -> int:
    cfg = config_from_args(args)
    p = parse_exponent(args.p)
    doc = {**provenance(cfg), "p": fmt(p), "mode": args.mode}
    if args.mode == "bound":
        doc["upper_bound"] = fmt(upper_bound_constant(p))
    elif args.mode == "extremal":
        grid = cfg.grid()
        witness = extremal_function([0.0, 0.0, 1.0], grid)
        doc["ratio"] = fmt(ratio(witness, p))
        doc["upper_bound"] = fmt(upper_bound_constant(p))
    else:
        if p == 1.0 or math.isinf(p):
            print(
                "error: search needs 1 < p < inf; use 'norm inf extremal' for p=inf, "
                "and p=1 equals p=inf by duality",
                file=sys.stderr,
            )
            return EXIT_USAGE
        grid = cfg.grid()
        report = norm_lower_bound_search(p, args.restarts, args.iters, cfg.seed, grid)
        witness_file = None
        if args.witness:
            write_sampled(args.witness, report.witness, {"seed": cfg.seed, "p": p})
            witness_file = str(args.witness)
        body = report.to_json(witness_file)
        body["iterations"] = [fmt(v) for v in body["iterations"]]
        body["best_trace"] = [fmt(v) for v in body["best_trace"]]
        for key in ("p", "q", "upper_bound", "lower_bound"):
            body[key] = fmt(body[key])
        doc.update(body)
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


def cmd_kernel_eval(args) -> int:
    try:
        r = float(args.r)
        t = float(args.t)
        s = float(args.s)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not 0.0 <= r < 1.0:
        raise UsageError("r must lie in [0, 1)")
    k = slice_kernel(r, parse_unit(args.I), t, parse_unit(args.J), s)
    if args.json:
        print(json.dumps({"r": r, "t": t, "s": s, "kernel": [fmt(v) for v in k], "version": __version__}))
    else:
        print(" ".join(fmt(v) for v in k))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-polar", type=int, default=48, help="polar nodes of the sphere rule (default 48)")
    common.add_argument("--n-azimuth", type=int, default=96, help="azimuthal nodes, even (default 96)")
    common.add_argument("--nt", type=int, default=256, help="circle nodes, even (default 256)")
    common.add_argument("--rule", choices=("angle", "cos"), default="angle", help="Gauss-Legendre in polar angle or in its cosine")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a named tolerance (repeatable)")
    common.add_argument("-o", "--output", help="write the result here instead of stdout")

    parser = argparse.ArgumentParser(prog="slicepi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", parents=[common], help="run the verification table")

    pr = sub.add_parser("project", parents=[common], help="project a sampled function file")
    pr.add_argument("input", help="sampled function, .csv or .json")
    pr.add_argument("--route", choices=("fourier", "boundary", "interior"), default="boundary")
    pr.add_argument("--r", type=float, help="radius in [0, 1) for the interior route")
    pr.add_argument("--force", action="store_true", help="project even if the input is not well defined")
    pr.add_argument("--well-defined-tol", type=float, default=DEFAULT_TOLERANCES["well_defined"])
    pr.add_argument("--summary", help="write the JSON summary here instead of stderr")

    nm = sub.add_parser("norm", parents=[common], help="bounds and lower-bound search for the L^p norm")
    nm.add_argument("p", help="exponent > 1, or inf")
    nm.add_argument("mode", choices=("bound", "search", "extremal"))
    nm.add_argument("--restarts", type=int, default=2)
    nm.add_argument("--iters", type=int, default=30)
    nm.add_argument("--witness", help="save the search witness to this file")

    ke = sub.add_parser("kernel-eval", parents=[common], help="evaluate the slice Poisson kernel")
    for name in ("r", "I", "t", "J", "s"):
        ke.add_argument(name)
    return parser


COMMANDS = {"verify": cmd_verify, "project": cmd_project, "norm": cmd_norm, "kernel-eval": cmd_kernel_eval}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
