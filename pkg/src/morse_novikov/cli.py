"""Command line entry point: ``morse-novikov <command> ...``.

Exit status:
  0  success, every checked inequality holds
  1  the two chord solvers disagree (internal error)
  2  parse error, bad arguments or mismatched classes
  3  validation failure of an input complex
  4  resource cap reached
  5  an asserted inequality is violated
  6  a hypothesis fails (not beta-Morse, degenerate point, positivity, regular value)
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .chords import MARGINAL_TOL, MATCH_TOL, essential_chords_1d, find_chords, sweep, verify_prop14_total
from .exceptions import (
    ClassMismatchError,
    DegenerateCriticalPointError,
    HypothesisError,
    ParseError,
    ResourceCapError,
    SolverDisagreementError,
    UsageError,
    ValidationError,
)
from .genfun import DEFAULT_FIBER_GRID, GeneratingFunction, fiber_critical_points, verify_theorem1
from .io import load_complex, load_function_file
from .novikov import DEFAULT_CELL_CAP, DEFAULT_PRIMES, novikov_numbers, verify_prop26, verify_window
from .smooth import DEFAULT_DEDUPE, DEFAULT_DEGENERACY, DEFAULT_TOL, critical_points, verify_theorem31
from .validation import check_mode, check_positive_int, check_primes, check_t_range, check_tolerance

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_CAP = 4
EXIT_VIOLATION = 5
EXIT_HYPOTHESIS = 6

VERIFY_CLAUSES = ("thm31", "thm1", "prop26", "prop14", "window", "chords")


@dataclass
class RunConfig:
    command: str
    inputs: list
    clause: str | None = None
    mode: str = "symbolic"
    trials: int = 5
    primes: tuple = DEFAULT_PRIMES
    seed: int = 0
    grid: int | None = None
    fiber_grid: int = DEFAULT_FIBER_GRID
    tol: float = DEFAULT_TOL
    t: float = 0.0
    t_range: tuple = (-0.4, 0.4)
    samples: int = 101
    radius: int = 2
    format: str = "json"
    cap_cells: int = DEFAULT_CELL_CAP
    extra: dict = field(default_factory=dict)

    def validate(self):
        check_mode(self.mode)
        self.trials = check_positive_int(self.trials, "trials")
        self.primes = check_primes(self.primes)
        self.seed = check_positive_int(self.seed, "seed", minimum=0)
        if self.grid is not None:
            self.grid = check_positive_int(self.grid, "grid", minimum=2, maximum=4096)
        self.fiber_grid = check_positive_int(self.fiber_grid, "fiber-grid", maximum=257)
        self.tol = check_tolerance(self.tol)
        self.t_range = check_t_range(self.t_range)
        self.samples = check_positive_int(self.samples, "samples", minimum=2, maximum=10001)
        self.radius = check_positive_int(self.radius, "radius", minimum=0, maximum=16)
        self.cap_cells = check_positive_int(self.cap_cells, "cap-cells")
        if self.format not in ("json", "text"):
            raise UsageError(f"format must be json or text, got {self.format!r}")
        return self

    def header(self):
        return {
            "command": self.command,
            "seed": self.seed,
            "tolerances": {
                "newton": self.tol,
                "dedupe_radius": DEFAULT_DEDUPE,
                "degeneracy": DEFAULT_DEGENERACY,
                "chord_match": MATCH_TOL,
                "marginal": MARGINAL_TOL,
            },
        }


# input lookup ---------------------------------------------------------------


def resolve_input(name):
    """A path on disk, or the name of a bundled example file."""
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files("morse_novikov") / "data" / path.name
    if bundled.is_file():
        return Path(str(bundled))
    raise UsageError(f"no such file: {name}")


def bundled_files():
    root = resources.files("morse_novikov") / "data"
    return sorted(p.name for p in root.iterdir() if p.name.endswith((".cplx", ".fn")))


def _complex(cfg, i=0):
    if len(cfg.inputs) <= i:
        raise UsageError(f"{cfg.command} needs a complex file")
    return load_complex(resolve_input(cfg.inputs[i]))


def _functions(cfg):
    if not cfg.inputs:
        raise UsageError(f"{cfg.command} needs a function file")
    return load_function_file(resolve_input(cfg.inputs[0]))


def _profile_arg(cfg):
    """Profile from an optional second input (a complex file)."""
    if len(cfg.inputs) < 2:
        return None
    tc = _complex(cfg, 1)
    return novikov_numbers(tc, cfg.mode, cfg.trials, cfg.seed, primes=())


def _generating(f):
    return f if isinstance(f, GeneratingFunction) else GeneratingFunction.from_function(f)


def _pair(spec):
    if spec.kind != "pair":
        raise UsageError("chord commands need a file with 'lagrangian 1' and 'lagrangian 2' blocks")
    return _generating(spec.first), _generating(spec.second)


# commands -------------------------------------------------------------------


def cmd_homology(cfg):
    tc = _complex(cfg)
    profile = novikov_numbers(tc, cfg.mode, cfg.trials, cfg.seed, cfg.primes)
    return EXIT_OK, {"clause": "homology", **profile.to_dict()}


def cmd_window(cfg):
    tc = _complex(cfg)
    rep = verify_window(tc, radii=range(cfg.radius + 1), cap_cells=cfg.cap_cells)
    rep["clause"] = "window"
    return EXIT_OK, rep


def cmd_critical_points(cfg):
    spec = _functions(cfg)
    if spec.kind == "function":
        res = critical_points(spec.function, spec.beta, cfg.grid, cfg.tol)
    elif spec.kind == "genfun":
        res = fiber_critical_points(spec.function, spec.beta, cfg.grid, cfg.fiber_grid, cfg.tol)
    else:
        raise UsageError("critical-points takes a single function, not a pair")
    code = EXIT_OK if res.beta_morse else EXIT_HYPOTHESIS
    return code, {"clause": "critical_points", **res.to_dict()}


def cmd_chords(cfg):
    spec = _functions(cfg)
    F1, F2 = _pair(spec)
    res = find_chords(F1, F2, spec.beta, cfg.t, cfg.grid, cfg.fiber_grid, cfg.tol)
    code = EXIT_OK if res.beta_morse and res.positive is not False else EXIT_HYPOTHESIS
    return code, {"clause": "chords", **res.to_dict()}


def cmd_sweep(cfg):
    spec = _functions(cfg)
    F1, F2 = _pair(spec)
    rep = sweep(F1, F2, spec.beta, cfg.t_range, cfg.samples, grid=cfg.grid, fiber_grid=cfg.fiber_grid,
                tol=cfg.tol)
    return EXIT_OK, {"clause": "sweep", **rep}


def _verdict(rep):
    if not rep.get("hypothesis_ok", True):
        return EXIT_HYPOTHESIS
    return EXIT_OK if rep["ok"] else EXIT_VIOLATION


def cmd_verify(cfg):
    clause = cfg.clause
    if clause == "prop26":
        rep = verify_prop26(_complex(cfg), mode=cfg.mode, trials=cfg.trials, seed=cfg.seed)
        return _verdict(rep), rep
    if clause == "window":
        code, rep = cmd_window(cfg)
        return _verdict(rep), rep
    spec = _functions(cfg)
    profile = _profile_arg(cfg)
    if clause == "thm31":
        if spec.kind != "function":
            raise UsageError("thm31 takes a function on the torus; use thm1 for generating functions")
        rep = verify_theorem31(spec.function, spec.beta, profile, grid=cfg.grid, tol=cfg.tol)
        return _verdict(rep), rep
    if clause == "thm1":
        if spec.kind == "pair":
            raise UsageError("thm1 takes a single generating function")
        rep = verify_theorem1(spec.generating, spec.beta, profile, grid=cfg.grid, fiber_grid=cfg.fiber_grid,
                              tol=cfg.tol)
        return _verdict(rep), rep
    # prop14 and its alias chords
    F1, F2 = _pair(spec)
    chords = find_chords(F1, F2, spec.beta, cfg.t, cfg.grid, cfg.fiber_grid, cfg.tol)
    rep = verify_prop14_total(F1, F2, spec.beta, cfg.t, profile, chords=chords)
    if chords.positive is False:
        rep["hypothesis_ok"] = False
    reports = [rep]
    if spec.n == 1 and F1.m == 0 and F2.m == 0 and chords.positive is not False:
        ess = essential_chords_1d(F1, F2, spec.beta, cfg.t, chords=chords)
        ess.pop("chords")
        reports.append(ess)
    out = {
        "clause": "prop14",
        "ok": all(r["ok"] for r in reports),
        "hypothesis_ok": all(r["hypothesis_ok"] for r in reports),
        "count": rep["count"],
        "bound": rep["bound"],
        "betti_novikov": rep["betti_novikov"],
        "profile_source": rep["profile_source"],
        "essential": reports[1] if len(reports) > 1 else None,
        "chords": rep["chords"],
    }
    return _verdict(out), out


COMMANDS = {
    "homology": cmd_homology,
    "window": cmd_window,
    "critical-points": cmd_critical_points,
    "verify": cmd_verify,
    "chords": cmd_chords,
    "sweep": cmd_sweep,
}


# output ---------------------------------------------------------------------


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, range)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def render(report, fmt):
    report = _sanitize(report)
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    lines = []
    for key in sorted(report):
        value = report[key]
        if isinstance(value, (dict, list)) and len(json.dumps(value)) > 100:
            size = len(value)
            kind = "entries" if isinstance(value, list) else "keys"
            lines.append(f"{key}: <{size} {kind}; use --format json>")
        else:
            lines.append(f"{key}: {json.dumps(value, sort_keys=True)}")
    return "\n".join(lines)


# argument parsing -----------------------------------------------------------


def _add_common(p):
    p.add_argument("--mode", default="symbolic", choices=("symbolic", "specialized"),
                   help="exact ranks over Q(t) or specialization at random integer points")
    p.add_argument("--trials", type=int, default=5, help="specialization points per rank (specialized mode)")
    p.add_argument("--primes", default=",".join(map(str, DEFAULT_PRIMES)),
                   help="comma separated primes for torsion bounds (empty for none)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=int, default=None, help="seed grid points per base coordinate")
    p.add_argument("--fiber-grid", type=int, default=DEFAULT_FIBER_GRID, help="seed points per fiber coordinate")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="Newton residual tolerance")
    p.add_argument("--t", type=float, default=0.0, help="chord length")
    p.add_argument("--t-range", type=float, nargs=2, default=(-0.4, 0.4), metavar=("LO", "HI"))
    p.add_argument("--samples", type=int, default=101, help="uniform samples in a sweep")
    p.add_argument("--radius", type=int, default=2, help="largest window radius")
    p.add_argument("--format", default="json", choices=("json", "text"))
    p.add_argument("--cap-cells", type=int, default=DEFAULT_CELL_CAP, help="cell limit for window complexes")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog="morse-novikov", description="Novikov homology and beta-critical point checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--list-data", action="store_true", help="list bundled example files and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    helps = {
        "homology": "Novikov numbers and torsion bounds of a complex file",
        "window": "integer homology of window complexes against the Novikov bound",
        "critical-points": "beta-critical points of a function or generating function file",
        "chords": "Liouville chords of length --t between the two Lagrangians of a pair file",
        "sweep": "chord counts over --t-range",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("inputs", nargs="+")
        _add_common(p)
    p = sub.add_parser("verify", help="check one inequality; exit 5 if it fails")
    p.add_argument("clause", choices=VERIFY_CLAUSES)
    p.add_argument("inputs", nargs="+", help="function file then optional complex file, or a complex file")
    _add_common(p)
    return parser


def config_from_args(args):
    primes = tuple(int(p) for p in args.primes.split(",") if p.strip()) if args.primes else ()
    return RunConfig(
        command=args.command, inputs=list(args.inputs), clause=getattr(args, "clause", None), mode=args.mode,
        trials=args.trials, primes=primes, seed=args.seed, grid=args.grid, fiber_grid=args.fiber_grid,
        tol=args.tol, t=args.t, t_range=tuple(args.t_range), samples=args.samples, radius=args.radius,
        format=args.format, cap_cells=args.cap_cells,
    ).validate()


def run(cfg: RunConfig):
    """Execute a config; returns ``(exit_code, report)``."""
    code, report = COMMANDS[cfg.command](cfg)
    return code, {**cfg.header(), **report}


def _fail(code, message, extra=None, fmt="json"):
    print(f"error: {message}", file=sys.stderr)
    if extra is not None:
        print(render(extra, fmt), file=sys.stderr)
    return code


def main(argv=None):
    fmt = "json"
    try:
        args = build_parser().parse_args(argv)
        if args.list_data:
            print("\n".join(bundled_files()))
            return EXIT_OK
        if args.command is None:
            raise UsageError("a command is required (see --help)")
        fmt = args.format
        try:
            cfg = config_from_args(args)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        code, report = run(cfg)
    except ParseError as exc:
        return _fail(EXIT_USAGE, f"parse error: {exc}")
    except ClassMismatchError as exc:
        return _fail(EXIT_USAGE, f"class mismatch: {exc}")
    except UsageError as exc:
        return _fail(EXIT_USAGE, str(exc))
    except ValidationError as exc:
        return _fail(EXIT_VALIDATION, f"validation failed: {exc}", {"violations": exc.violations}, fmt)
    except ResourceCapError as exc:
        return _fail(EXIT_CAP, f"resource cap: {exc}")
    except (HypothesisError, DegenerateCriticalPointError) as exc:
        return _fail(EXIT_HYPOTHESIS, f"hypothesis failure: {exc}")
    except SolverDisagreementError as exc:
        return _fail(EXIT_SOLVER, f"solver disagreement: {exc}", {"first": exc.first, "second": exc.second}, fmt)
    print(render(report, fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
