"""Command-line front end: plot-ready CSV/JSON data files for every
capability of the library.

Subcommands: spectrum | expect | gaps | density | contours | extrema |
scaling | overlap.  Numeric options accept arithmetic expressions
(e.g. --xi1 "-30/sqrt(2)"), ranges are START:STOP:COUNT with expression
endpoints.  Output is deterministic: fixed float formatting, fixed row
order, and a header that embeds the fully resolved configuration so any
file can be reproduced from its own header.

Exit codes: 0 success, 2 configuration error (no output written),
3 solver non-convergence (partial output retained).
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .classical import NoSaddleError, contours, default_grid, find_extrema
from .eigen import NonConvergenceError, PrecisionPlan, diagonalize
from .model import ModelParams, build_hamiltonian, default_dim
from .observables import adjacent_gaps, level_density, sweep
from .scaling import (
    choose_gap_index,
    coherent_overlap,
    fit_exponential,
    fit_report,
    format_gap,
    scaling_point,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNCONVERGED = 3

FLOAT_FMT = ".17g"


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# expression / range parsing

_ALLOWED_NAMES = {"pi": math.pi, "e": math.e}
_ALLOWED_FUNCS = {"sqrt": math.sqrt, "exp": math.exp, "log": math.log}


def parse_expr(text: str) -> float:
    """Safe arithmetic expression -> float (numbers, + - * / **, sqrt, pi, e)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
            return a**b
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Name) and node.id in _ALLOWED_NAMES:
            return _ALLOWED_NAMES[node.id]
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _ALLOWED_FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            return _ALLOWED_FUNCS[node.func.id](ev(node.args[0]))
        raise ConfigError(f"unsupported expression element in {text!r}")

    try:
        return float(ev(ast.parse(text, mode="eval")))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc}") from None


def parse_range(text: str, geometric: bool = False) -> np.ndarray:
    """START:STOP:COUNT -> grid; endpoints may be expressions."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must be START:STOP:COUNT, got {text!r}")
    start, stop = parse_expr(parts[0]), parse_expr(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise ConfigError(f"range count must be an integer, got {parts[2]!r}") from None
    if count < 1:
        raise ConfigError(f"range count must be positive, got {count}")
    if count == 1:
        return np.array([start])
    if geometric:
        if start <= 0 or stop <= 0:
            raise ConfigError("geometric range needs positive endpoints")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def parse_list(text: str) -> list[float]:
    return [parse_expr(part) for part in text.split(",") if part.strip()]


# ---------------------------------------------------------------------------
# output helpers


def fmt(x) -> str:
    return format(float(x), FLOAT_FMT)


class Writer:
    """Collects rows, then writes CSV (with # headers) or JSON atomically."""

    def __init__(self, config: dict, columns: list[str]):
        self.config = config
        self.columns = columns
        self.rows: list[list] = []

    def add(self, *values):
        self.rows.append(list(values))

    def meta(self) -> dict:
        return {"tool": "kposim", "version": __version__, "config": self.config}

    def write(self, out, fmt_kind: str, extra: dict | None = None):
        if fmt_kind == "csv":
            lines = [
                f"# kposim {__version__}",
                f"# config: {json.dumps(self.config, sort_keys=True)}",
            ]
            if extra:
                lines.append(f"# {json.dumps(extra, sort_keys=True)}")
            lines.append(",".join(self.columns))
            for row in self.rows:
                lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
            text = "\n".join(lines) + "\n"
        else:
            payload = {
                "meta": self.meta(),
                "columns": self.columns,
                "rows": [
                    [v if isinstance(v, str) else float(v) for v in row] for row in self.rows
                ],
            }
            if extra:
                payload.update(extra)
            text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
        if out in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(out, "w") as fh:
                fh.write(text)


# ---------------------------------------------------------------------------
# argument plumbing


def _add_common(p: argparse.ArgumentParser, sweepable: bool = False):
    p.add_argument("--xi1", default="0", help="one-photon drive amplitude (expression)")
    p.add_argument("--xi2", default="0", help="two-photon drive amplitude (expression)")
    p.add_argument("--ne", default="1", help="classicality parameter N_e (expression)")
    p.add_argument("--dim", type=int, default=0, help="Fock truncation; 0 = automatic rule")
    p.add_argument("--out", default="-", help="output path ('-' = stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--config", default=None, help="JSON file of option defaults (flags override)")
    if sweepable:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--xi1-range", default=None, help="sweep xi1, START:STOP:COUNT")
        g.add_argument("--xi2-range", default=None, help="sweep xi2, START:STOP:COUNT")
        g.add_argument("--ne-range", default=None, help="sweep N_e, START:STOP:COUNT")
        p.add_argument("--workers", type=int, default=1, help="parallel sweep workers")


# tokens like "-30/sqrt(2)" are expression values, not options; argparse only
# recognizes plain negative numbers by default
_VALUE_TOKEN = re.compile(r"^-\d")


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        self._negative_number_matcher = _VALUE_TOKEN


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="kposim",
        description="Squeeze-driven Kerr parametric oscillator: spectra, observables, classical surface, gap scaling.",
    )
    ap.add_argument("--version", action="version", version=f"kposim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="lowest eigenvalues, optionally swept along one axis")
    _add_common(p, sweepable=True)
    p.add_argument("--levels", type=int, default=20, help="how many lowest levels to keep")

    p = sub.add_parser("expect", help="<Q> and <P> of selected eigenstates")
    _add_common(p, sweepable=True)
    p.add_argument("--states", default="0,1", help="comma list of state indices")
    p.add_argument("--localize", action="store_true", help="engage the epsilon (Q+P) localization term")
    p.add_argument("--epsilon", default="0", help="localization amplitude; 0 = automatic default")

    p = sub.add_parser("gaps", help="adjacent-level gaps at one parameter point")
    _add_common(p)
    p.add_argument("--levels", type=int, default=0, help="limit to lowest K levels (0 = all)")

    p = sub.add_parser("density", help="smoothed level density at one parameter point")
    _add_common(p)
    p.add_argument("--window", default="0", help="kernel width; 0 = adaptive (3 x local spacing)")
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--emax", default=None, help="keep only levels below this energy (expression)")

    p = sub.add_parser("contours", help="classical iso-energy contour polylines")
    _add_common(p)
    p.add_argument("--energies", required=True, help="comma list of energies (expressions)")
    p.add_argument("--qrange", default=None, help="LO:HI (expressions); default covers all wells")
    p.add_argument("--prange", default=None, help="LO:HI (expressions); default covers all wells")
    p.add_argument("--resolution", type=int, default=512)

    p = sub.add_parser("extrema", help="classical stationary points, classified")
    _add_common(p)

    p = sub.add_parser("scaling", help="gap-vs-N_e study with exponential fit")
    _add_common(p)
    p.set_defaults(ne="0.5:4:8")  # desk-scale default grid; single values work too
    p.add_argument("--gap-index", type=int, default=-1, help="-1 = paper convention (2 symmetric / 0 deformed)")
    p.add_argument("--spacing", choices=("geom", "linear"), default="geom", help="N_e grid spacing")
    p.add_argument("--initial-bits", type=int, default=128)
    p.add_argument("--max-bits", type=int, default=4096)
    p.add_argument("--gap-rel-tol", type=float, default=1e-3)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("overlap", help="coherent-state overlap: truncated numeric vs closed form")
    _add_common(p)

    return ap


def resolve_config(args: argparse.Namespace, argv: list[str], ap: argparse.ArgumentParser) -> argparse.Namespace:
    """Apply --config file values as defaults, command-line flags win."""
    if not getattr(args, "config", None):
        return args
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    known = set(vars(args))
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = argparse.Namespace(**vars(args))
    explicit = _explicit_dests(argv, ap)
    for key, value in cfg.items():
        if key not in explicit:
            setattr(merged, key, value)
    return merged


def _explicit_dests(argv: list[str], ap: argparse.ArgumentParser) -> set[str]:
    """Option dests that were given on the command line itself."""
    dests = set()
    for token in argv:
        if token.startswith("--"):
            dests.add(token[2:].split("=", 1)[0].replace("-", "_"))
    return dests


def public_config(args: argparse.Namespace) -> dict:
    # the output path is not part of the scientific configuration: identical
    # configs must produce byte-identical files wherever they are written
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("config", "out")}
    return cfg


def _params(args, xi1=None, xi2=None, n_e=None, epsilon=0.0) -> ModelParams:
    xi1 = parse_expr(args.xi1) if xi1 is None else xi1
    xi2 = parse_expr(args.xi2) if xi2 is None else xi2
    n_e = parse_expr(args.ne) if n_e is None else n_e
    dim = args.dim if args.dim > 0 else default_dim(xi1, xi2, n_e)
    return ModelParams(xi1, xi2, n_e, dim, epsilon)


def _sweep_axis(args) -> tuple[str, np.ndarray]:
    if getattr(args, "xi1_range", None):
        return "xi1", parse_range(args.xi1_range)
    if getattr(args, "xi2_range", None):
        return "xi2", parse_range(args.xi2_range)
    if getattr(args, "ne_range", None):
        return "n_e", parse_range(args.ne_range)
    # single point: degenerate one-value sweep over xi2
    return "xi2", np.array([parse_expr(args.xi2)])


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(args) -> int:
    axis, grid = _sweep_axis(args)
    template = _params(args)
    result = sweep(template, axis, grid, outputs=("spectrum",), k_levels=args.levels)
    writer = Writer(public_config(args), ["axis_value", "level_index", "energy", "energy_per_ne"])
    failed = 0
    for point in result.points:
        if not point.ok:
            failed += 1
            continue
        n_e = point.axis_value if axis == "n_e" else template.n_e
        for idx, energy in enumerate(point.energies):
            writer.add(point.axis_value, idx, energy, energy / n_e)
    writer.write(args.out, args.format, extra={"axis": axis, "dim": result.dim, "failed_points": failed})
    return EXIT_UNCONVERGED if failed else EXIT_OK


def cmd_expect(args) -> int:
    axis, grid = _sweep_axis(args)
    epsilon = parse_expr(args.epsilon) if args.localize else 0.0
    template = _params(args, epsilon=epsilon)
    states = tuple(int(s) for s in args.states.split(","))
    result = sweep(
        template,
        axis,
        grid,
        outputs=("expectations",),
        states=states,
        localize=args.localize,
    )
    writer = Writer(public_config(args), ["axis_value", "state_index", "energy", "q_mean", "p_mean"])
    failed = 0
    for point in result.points:
        if not point.ok:
            failed += 1
            continue
        for rec in point.expect:
            writer.add(point.axis_value, rec.state_index, rec.energy, rec.q_mean, rec.p_mean)
    writer.write(args.out, args.format, extra={"axis": axis, "dim": result.dim, "failed_points": failed})
    return EXIT_UNCONVERGED if failed else EXIT_OK


def cmd_gaps(args) -> int:
    params = _params(args)
    spectrum = diagonalize(build_hamiltonian(params))
    energies = spectrum.energies[: args.levels] if args.levels > 0 else spectrum.energies
    writer = Writer(public_config(args), ["j", "energy", "gap"])
    for rec in adjacent_gaps(energies):
        writer.add(rec.j, rec.energy, rec.gap)
    writer.write(args.out, args.format, extra={"dim": params.dim})
    return EXIT_OK


def cmd_density(args) -> int:
    params = _params(args)
    spectrum = diagonalize(build_hamiltonian(params))
    energies = spectrum.energies
    if args.emax is not None:
        energies = energies[energies < parse_expr(args.emax)]
    window = parse_expr(args.window)
    result = level_density(energies, window=None if window == 0 else window, samples=args.samples)
    writer = Writer(public_config(args), ["energy", "density"])
    for e, d in zip(result.grid, result.density):
        writer.add(e, d)
    writer.write(
        args.out,
        args.format,
        extra={"dim": params.dim, "peak_energy": result.peak_energy(), "levels_used": int(len(energies))},
    )
    return EXIT_OK


def cmd_contours(args) -> int:
    xi1, xi2 = parse_expr(args.xi1), parse_expr(args.xi2)
    energies = parse_list(args.energies)
    if not energies:
        raise ConfigError("--energies list is empty")
    qr, pr, res = default_grid(xi2)
    if args.qrange:
        lo, _, hi = args.qrange.partition(":")
        qr = (parse_expr(lo), parse_expr(hi))
    if args.prange:
        lo, _, hi = args.prange.partition(":")
        pr = (parse_expr(lo), parse_expr(hi))
    sets = contours(xi1, xi2, energies, grid=(qr, pr, args.resolution))
    if args.format == "json":
        payload = {
            "meta": {"tool": "kposim", "version": __version__, "config": public_config(args)},
            "extrema": [
                {
                    "kind": e.kind,
                    "q": e.point.q,
                    "p": e.point.p,
                    "energy": e.point.energy,
                }
                for e in find_extrema(xi1, xi2)
            ],
            "sets": [
                {
                    "energy": cs.energy,
                    "curves": [
                        {
                            "closed": c.closed,
                            "encloses": list(c.encloses),
                            "points": [[float(q), float(p)] for q, p in c.points],
                        }
                        for c in cs.curves
                    ],
                }
                for cs in sets
            ],
        }
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
        if args.out in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(args.out, "w") as fh:
                fh.write(text)
        return EXIT_OK
    writer = Writer(public_config(args), ["energy", "curve", "closed", "vertex", "q", "p"])
    for cs in sets:
        for ci, curve in enumerate(cs.curves):
            for vi, (q, p) in enumerate(curve.points):
                writer.add(cs.energy, ci, int(curve.closed), vi, q, p)
    writer.write(args.out, args.format)
    return EXIT_OK


def cmd_extrema(args) -> int:
    xi1, xi2 = parse_expr(args.xi1), parse_expr(args.xi2)
    writer = Writer(
        public_config(args), ["kind", "q", "p", "energy", "hess_low", "hess_high", "degenerate"]
    )
    for e in find_extrema(xi1, xi2):
        writer.add(
            e.kind,
            e.point.q,
            e.point.p,
            e.point.energy,
            e.hessian_eigenvalues[0],
            e.hessian_eigenvalues[1],
            int(e.degenerate),
        )
    writer.write(args.out, args.format)
    return EXIT_OK


def _scaling_worker(task):
    xi1, xi2, n_e, gap_index, plan_fields = task
    plan = PrecisionPlan(**plan_fields)
    return scaling_point(xi1, xi2, n_e, gap_index, plan)


def cmd_scaling(args) -> int:
    xi1, xi2 = parse_expr(args.xi1), parse_expr(args.xi2)
    if ":" in args.ne:
        grid = parse_range(args.ne, geometric=(args.spacing == "geom"))
    else:
        grid = np.array([parse_expr(args.ne)])
    grid = np.asarray(sorted(float(v) for v in grid))
    j = choose_gap_index(xi1) if args.gap_index < 0 else args.gap_index
    plan_fields = {
        "initial_bits": args.initial_bits,
        "max_bits": args.max_bits,
        "gap_rel_tol": args.gap_rel_tol,
    }
    tasks = [(xi1, xi2, float(n_e), j, plan_fields) for n_e in grid]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            points = list(pool.map(_scaling_worker, tasks))
    else:
        points = [_scaling_worker(t) for t in tasks]

    converged = [p for p in points if p.converged]
    fit_info = None
    if len(converged) >= 2:
        fit_info = fit_report(fit_exponential(points), xi2)

    writer = Writer(
        public_config(args), ["n_e", "gap", "converged", "precision_bits", "dim", "gap_index"]
    )
    for p in points:
        writer.add(p.n_e, format_gap(p.gap), int(p.converged), p.precision_bits, p.dim, p.gap_index)
    if args.format == "json":
        writer.write(args.out, "json", extra={"fit": fit_info})
    else:
        writer.write(args.out, "csv", extra={"fit": fit_info} if fit_info else None)
        if args.out not in (None, "-"):
            with open(args.out + ".fit.json", "w") as fh:
                json.dump({"meta": writer.meta(), "fit": fit_info}, fh, indent=1, sort_keys=True)
                fh.write("\n")
    return EXIT_OK if len(converged) == len(points) else EXIT_UNCONVERGED


def cmd_overlap(args) -> int:
    xi2 = parse_expr(args.xi2)
    n_e = parse_expr(args.ne)
    dim = args.dim if args.dim > 0 else max(64, int(math.ceil(32 * abs(xi2) * n_e)))
    numeric, analytic = coherent_overlap(xi2, n_e, dim)
    writer = Writer(public_config(args), ["xi2", "n_e", "dim", "numeric", "analytic", "abs_error"])
    writer.add(xi2, n_e, dim, numeric, analytic, abs(numeric - analytic))
    writer.write(args.out, args.format)
    return EXIT_OK


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "expect": cmd_expect,
    "gaps": cmd_gaps,
    "density": cmd_density,
    "contours": cmd_contours,
    "extrema": cmd_extrema,
    "scaling": cmd_scaling,
    "overlap": cmd_overlap,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        args = resolve_config(args, argv, ap)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"kposim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, NoSaddleError) as exc:
        print(f"kposim: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergenceError as exc:
        print(f"kposim: solver did not converge: {exc} {exc.details}", file=sys.stderr)
        return EXIT_UNCONVERGED


if __name__ == "__main__":
    sys.exit(main())
