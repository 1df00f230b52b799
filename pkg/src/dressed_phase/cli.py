"""
Command-line front end.

    dressed-phase pst-cycle --n 4
    dressed-phase boson-ring --nu 7 --nl 5
    dressed-phase surface --theta0 1 --n 1 --grid 81x81 --format csv -o fig1.csv

Angles are in radians. Output is JSON (keys sorted, newline-terminated) or,
for ``surface`` only, CSV. Exit status: 0 all checks pass, 1 a check failed
or the output could not be written, 2 invalid arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any

from . import scenarios
from .scenarios import ScenarioReport, SurfaceGrid
from .selftest import run_selftest

SUBCOMMANDS = ("pst-cycle", "pst-transfer", "qubit-gate", "surface", "dark-state", "boson-ring",
               "selftest")
CSV_HEADER = ("xi", "gamma", "beta_numeric", "beta_paper", "re_exp_i_beta_numeric",
              "re_exp_i_beta_paper")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    parameters: dict[str, Any] = field(default_factory=dict)
    output_format: str = "json"
    output_path: str | None = None  # None means standard output
    seed: int = 0


def _grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 81x81, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dressed-phase",
        description="Dressed-state gates and their dynamical / geometric phases.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json",
                        help="output format (csv only for surface)")
    common.add_argument("-o", "--output", dest="output_path", default=None,
                        help="write to this file instead of standard output")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    for name, text in (("pst-cycle", "full-cycle phase of an engineered XY chain (G = I)"),
                       ("pst-transfer", "transfer phase of an engineered XY chain dressed by the mirror gate")):
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        p.add_argument("--n", dest="N", type=int, default=4, help="N: number of chain sites (>= 2)")
        p.add_argument("--j", dest="J", type=float, default=1.0, help="J: coupling scale (> 0)")
        p.add_argument("--samples", type=int, default=scenarios.DEFAULT_SAMPLES,
                       help="trajectory samples per segment")

    p = sub.add_parser("qubit-gate", parents=[common],
                       help="two-stage qubit schedule realizing exp(-i theta0 sigma_x)")
    p.add_argument("--varpi-delta", type=float, default=math.pi / 3,
                   help="varpi*delta: phase accumulated in the sigma_z stage (non-zero)")
    p.add_argument("--theta0", type=float, default=math.pi / 4, help="theta0: gate angle in (0, 2 pi)")
    p.add_argument("--delta", type=float, default=1.0, help="delta: duration of the sigma_z stage")
    p.add_argument("--omega", type=float, default=1.0, help="omega: sigma_x strength (> 0)")
    p.add_argument("--samples", type=int, default=scenarios.DEFAULT_SAMPLES,
                   help="trajectory samples per segment")

    p = sub.add_parser("surface", parents=[common],
                       help="geometric phase over initial states (xi, gamma) at varpi*delta = pi n")
    p.add_argument("--theta0", type=float, default=1.0, help="theta0: gate angle in (0, 2 pi)")
    p.add_argument("--n", dest="n", type=int, default=1, help="n: integer with varpi*delta = pi n")
    p.add_argument("--grid", type=_grid, default=(81, 81),
                   help="xi x gamma grid, e.g. 81x81 (xi over [0, pi], gamma over [0, 2 pi])")
    p.add_argument("--samples", type=int, default=scenarios.DEFAULT_SAMPLES,
                   help="trajectory samples per segment")

    p = sub.add_parser("dark-state", parents=[common],
                       help="adiabatic loop of the dressed Lambda-system dark state")
    p.add_argument("--theta-c", type=float, default=math.pi / 2,
                   help="theta_c: polar angle of the loop in [0, pi]")
    p.add_argument("--duration", type=float, default=2000.0, help="loop duration (> 0)")
    p.add_argument("--samples", type=int, default=scenarios.DEFAULT_SAMPLES,
                   help="midpoint steps per loop leg")

    p = sub.add_parser("boson-ring", parents=[common],
                       help="interference factor at site B of a two-arm bosonic ring")
    p.add_argument("--nu", dest="N_U", type=int, default=7, help="N_U: sites on the upper arm (>= 2)")
    p.add_argument("--nl", dest="N_L", type=int, default=5, help="N_L: sites on the lower arm (>= 2)")
    p.add_argument("--j", dest="J", type=float, default=1.0, help="J: coupling scale (> 0)")
    p.add_argument("--no-coupled", dest="coupled", action="store_false",
                   help="skip the shared-endpoint ring evolution")

    p = sub.add_parser("selftest", parents=[common],
                       help="invariant suite plus acceptance matrix")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized invariants")
    p.add_argument("--tolerance-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def _validate(cfg: RunConfig) -> str | None:
    p = cfg.parameters
    if cfg.output_format == "csv" and cfg.subcommand != "surface":
        return "csv output is only available for surface"
    if p.get("samples", 1) < 1:
        return "--samples must be >= 1"
    if "J" in p and not p["J"] > 0:
        return "--j must be positive"
    sub = cfg.subcommand
    if sub in ("pst-cycle", "pst-transfer") and p["N"] < 2:
        return "--n must be >= 2"
    if sub in ("qubit-gate", "surface") and not 0 < p["theta0"] < 2 * math.pi:
        return "--theta0 must lie in (0, 2 pi)"
    if sub == "qubit-gate":
        if p["varpi_delta"] == 0 or not math.isfinite(p["varpi_delta"]):
            return "--varpi-delta must be finite and non-zero"
        if not p["delta"] > 0 or not p["omega"] > 0:
            return "--delta and --omega must be positive"
    if sub == "surface":
        if p["n"] == 0:
            return "--n must be a non-zero integer"
        if min(p["grid"]) < 2:
            return "--grid needs at least 2 points per axis"
    if sub == "dark-state":
        if not 0 <= p["theta_c"] <= math.pi:
            return "--theta-c must lie in [0, pi]"
        if not p["duration"] > 0:
            return "--duration must be positive"
    if sub == "boson-ring" and min(p["N_U"], p["N_L"]) < 2:
        return "--nu and --nl must be >= 2"
    return None


def parse_args(argv: list[str]) -> RunConfig:
    """Parse and validate; exits with status 2 on bad input, 0 on --help."""
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    sub = ns.pop("subcommand")
    fmt = ns.pop("output_format")
    path = ns.pop("output_path")
    seed = ns.pop("seed", 0)
    cfg = RunConfig(sub, ns, fmt, path, seed)
    err = _validate(cfg)
    if err:
        parser.error(err)
    return cfg


def run_scenario(cfg: RunConfig) -> tuple[ScenarioReport, SurfaceGrid | None]:
    p = cfg.parameters
    sub = cfg.subcommand
    if sub == "pst-cycle":
        return scenarios.scenario_pst_cycle(p["N"], p["J"], p["samples"]), None
    if sub == "pst-transfer":
        return scenarios.scenario_pst_transfer(p["N"], p["J"], p["samples"]), None
    if sub == "qubit-gate":
        return scenarios.scenario_qubit_gate(p["varpi_delta"], p["theta0"], p["delta"], p["omega"],
                                             p["samples"]), None
    if sub == "surface":
        gx, gg = p["grid"]
        return scenarios.scenario_superposition_surface(gx, gg, p["theta0"], p["n"], p["samples"])
    if sub == "dark-state":
        rep = scenarios.scenario_dark_state_loop(p["theta_c"], p["duration"], p["samples"])
        return rep.as_scenario_report(), None
    if sub == "boson-ring":
        rep = scenarios.scenario_boson_ring(p["N_U"], p["N_L"], p["J"], p["coupled"])
        return rep.as_scenario_report(), None
    if sub == "selftest":
        return run_selftest(cfg.seed, p.get("tolerance_scale", 1.0)), None
    raise ValueError(f"unknown subcommand {sub!r}")


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):  # numpy scalars
        return v.item()
    return v


def emit_report(report, config: RunConfig, grid: SurfaceGrid | None = None) -> bytes:
    """Serialize a report: JSON object, or the surface grid as CSV."""
    if config.output_format == "csv":
        if grid is None:
            raise ValueError("csv output needs surface grid data")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in grid.rows():
            w.writerow([repr(x) for x in row])
        return buf.getvalue().encode()

    report = report.as_scenario_report()
    doc = {
        "scenario": report.scenario,
        "inputs": {k: _jsonable(v) for k, v in report.inputs.items()},
        "outputs": {k: _jsonable(v) for k, v in report.outputs.items()},
        "checks": [{"name": c.name, "expected": c.expected, "observed": c.observed,
                    "tolerance": c.tolerance, "passed": c.passed} for c in report.checks],
    }
    return (json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n").encode()


def main(argv: list[str] | None = None) -> int:
    cfg = parse_args(sys.argv[1:] if argv is None else argv)
    report, grid = run_scenario(cfg)
    data = emit_report(report, cfg, grid)
    if cfg.output_path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        try:
            with open(cfg.output_path, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            print(f"dressed-phase: cannot write {cfg.output_path}: {exc.strerror}", file=sys.stderr)
            return 1
    failed = report.failures()
    if failed:
        print(f"dressed-phase: failed check {failed[0].name}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
