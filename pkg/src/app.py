"""Command-line front end.

Commands: compute, scan, threshold, verify, mub. Data goes to stdout (or
the --out file), diagnostics to stderr. Exit codes: 0 success, 1 failed
verification, 2 usage or validation error.
"""

import argparse
import csv
import json
import logging
import sys
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ValidationError

from src.config import NaqcSettings, load_settings
from src.quantum import (
    SUPPORTED_DIMENSIONS,
    BoundKind,
    CoherenceMeasure,
    DensityMatrix,
    DimensionError,
    IndexPattern,
    NaqcError,
    decode_matrix,
    find_threshold,
    mubs_prime_power,
    optimize_s,
    rotated_qubit_mubs,
    s_report,
    scan_werner,
    steer,
    werner_state,
)
from src.suites import SUITES, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_ERROR = 2

SCAN_HEADER = ["p_w", "s_opt", "theta", "phi", "s_full_pattern", "bound_lhs", "bound_sqi"]
PATTERN_HEADER = ["s_ijk_over_2", "s_full_over_9"]
BOUND_CHOICES = {"lhs": BoundKind.LHS, "sqi": BoundKind.SQI1}


class StateFile(BaseModel):
    dims: Tuple[int, int]
    matrix: List[List[List[float]]]

    @classmethod
    def load(cls, path: str) -> "StateFile":
        with open(path, "r") as f:
            text = f.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise NaqcError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        return cls.model_validate(data)

    def to_state(self, tol: float) -> DensityMatrix:
        return DensityMatrix.from_array(decode_matrix(self.matrix), dims=self.dims, tol=tol)


def _measure(name: str) -> CoherenceMeasure:
    return CoherenceMeasure.l1() if name == "l1" else CoherenceMeasure.relent()


def _significant(value: Any) -> Any:
    """Round every float to 15 significant digits, recursively."""
    if isinstance(value, float):
        return float(f"{value:.15g}")
    if isinstance(value, dict):
        return {k: _significant(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_significant(v) for v in value]
    return value


def _emit_json(data: Any) -> None:
    sys.stdout.write(json.dumps(_significant(data), indent=2) + "\n")


def cmd_compute(args: argparse.Namespace, settings: NaqcSettings) -> int:
    if args.state is not None:
        rho = StateFile.load(args.state).to_state(settings.tolerance)
    else:
        rho = werner_state(args.werner, settings.tolerance)
    measure = _measure(args.measure)
    pattern = IndexPattern.parse(args.pattern)
    d_a, d_b = rho.dims

    if d_a != d_b:
        raise DimensionError(f"Alice and Bob need equal dimensions, got {rho.dims}")
    if d_a != 2:
        if args.optimize or args.theta is not None or args.phi is not None:
            raise DimensionError("frame choice and optimization are offered for two qubits only")
        fam = mubs_prime_power(d_a)
        report = s_report(steer(rho, fam), fam, measure, pattern)
        _emit_json(report.model_dump(mode="json"))
        return EXIT_OK

    theta_b = phi_b = None
    if args.optimize:
        opt = optimize_s(
            rho,
            measure,
            pattern,
            grid_theta=settings.grid_theta,
            grid_phi=settings.grid_phi,
            independent_frames=args.independent_frames,
            max_evaluations=settings.max_refine_evaluations,
            xatol=settings.refine_tolerance,
        )
        theta, phi, theta_b, phi_b = opt.theta, opt.phi, opt.theta_b, opt.phi_b
    elif args.theta is not None or args.phi is not None:
        theta, phi = args.theta or 0.0, args.phi or 0.0
    else:
        theta = phi = 0.0

    alice = rotated_qubit_mubs(theta, phi)
    bob = alice if theta_b is None else rotated_qubit_mubs(theta_b, phi_b)
    report = s_report(steer(rho, alice), bob, measure, pattern, theta, phi, theta_b, phi_b)
    _emit_json(report.model_dump(mode="json"))
    return EXIT_OK


def _scan_rows(records, with_patterns: bool) -> List[List[str]]:
    rows = []
    for rec in records:
        values = [
            rec.p_w,
            rec.opt.s_max,
            rec.opt.theta,
            rec.opt.phi,
            rec.s_full_pattern,
            rec.bounds.lhs,
            rec.bounds.sqi,
        ]
        if with_patterns:
            values += [rec.opt.s_max / 2, rec.s_full_pattern / 9]
        rows.append([f"{v:.6f}" for v in values])
    return rows


def cmd_scan(args: argparse.Namespace, settings: NaqcSettings) -> int:
    if args.steps < 2:
        raise ValueError("--steps must be at least 2")
    records = scan_werner(
        _measure(args.measure),
        np.linspace(0.0, 1.0, args.steps),
        grid_theta=settings.grid_theta,
        grid_phi=settings.grid_phi,
        independent_frames=args.independent_frames,
        max_evaluations=settings.max_refine_evaluations,
        xatol=settings.refine_tolerance,
        tol=settings.tolerance,
    )
    header = SCAN_HEADER + (PATTERN_HEADER if args.patterns else [])
    rows = _scan_rows(records, args.patterns)

    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    if out is not sys.stdout:
        logger.info(f"Wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_threshold(args: argparse.Namespace, settings: NaqcSettings) -> int:
    result = find_threshold(
        _measure(args.measure),
        BOUND_CHOICES[args.bound],
        grid_theta=settings.grid_theta,
        grid_phi=settings.grid_phi,
        tol=settings.tolerance,
    )
    _emit_json(
        {
            "measure": args.measure,
            "bound": args.bound,
            "bound_value": result.bound,
            "p_star": result.p_star if result.p_star is not None else "none",
            "iterations": result.iterations,
        }
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: NaqcSettings) -> int:
    report = run_suite(args.suite, args.trials, settings.seed, settings)
    _emit_json(report.model_dump(mode="json"))
    if report.ok:
        return EXIT_OK
    for check in report.checks:
        if not check.passed:
            logger.error(f"{check.name}: observed {check.observed:.12g}, bound {check.bound:g}, seed {check.offending_seed}")
    return EXIT_VERIFY_FAILED


def cmd_mub(args: argparse.Namespace, settings: NaqcSettings) -> int:
    rotated = args.theta is not None or args.phi is not None
    if rotated and args.dim != 2:
        raise DimensionError("--theta/--phi rotate qubit triples only")
    if rotated:
        fam = rotated_qubit_mubs(args.theta or 0.0, args.phi or 0.0)
    else:
        fam = mubs_prime_power(args.dim)
    _emit_json(fam.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="naqc",
        description="Nonlocal advantage of quantum coherence: evaluate, scan, and verify bounds.",
    )
    parser.add_argument("--config", help="JSON settings file (overrides NAQC_CONFIG).")
    parser.add_argument("--log-level", help="Logging level for diagnostics on stderr.")
    parser.add_argument("--grid-theta", type=int, help="Frame-search grid points in theta.")
    parser.add_argument("--grid-phi", type=int, help="Frame-search grid points in phi.")
    parser.add_argument("--tolerance", type=float, help="State validation tolerance.")
    parser.add_argument("--seed", type=int, help="Base seed for random sampling.")
    commands = parser.add_subparsers(dest="command", required=True)

    compute = commands.add_parser("compute", help="Evaluate S for one state.")
    source = compute.add_mutually_exclusive_group(required=True)
    source.add_argument("--state", help="State file with dims and a [re, im] matrix.")
    source.add_argument("--werner", type=float, help="Werner weight p_w in [0, 1].")
    compute.add_argument("--measure", choices=["l1", "relent"], default="l1")
    compute.add_argument("--optimize", action="store_true", help="Maximize over the measurement frame.")
    compute.add_argument("--pattern", default=IndexPattern.DISTINCT.value, help="Index pattern, by value or name.")
    compute.add_argument("--theta", type=float, help="Frame polar angle (two qubits).")
    compute.add_argument("--phi", type=float, help="Frame azimuth (two qubits).")
    compute.add_argument("--independent-frames", action="store_true", help="Optimize Alice's and Bob's frames separately.")
    compute.set_defaults(handler=cmd_compute)

    scan = commands.add_parser("scan", help="Optimized S along the Werner family, as CSV.")
    scan.add_argument("--measure", choices=["l1", "relent"], default="l1")
    scan.add_argument("--steps", type=int, default=101)
    scan.add_argument("--out", help="Output CSV path (stdout when omitted).")
    scan.add_argument("--patterns", action="store_true", help="Add the normalized pattern columns.")
    scan.add_argument("--independent-frames", action="store_true")
    scan.set_defaults(handler=cmd_scan)

    threshold = commands.add_parser("threshold", help="Werner weight where S crosses a bound.")
    threshold.add_argument("--measure", choices=["l1", "relent"], default="l1")
    threshold.add_argument("--bound", choices=sorted(BOUND_CHOICES), default="lhs")
    threshold.set_defaults(handler=cmd_threshold)

    verify = commands.add_parser("verify", help="Run a property suite.")
    verify.add_argument("--suite", choices=list(SUITES), required=True)
    verify.add_argument("--trials", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Base seed (same as the global flag).")
    verify.set_defaults(handler=cmd_verify)

    mub = commands.add_parser("mub", help="Dump a family of mutually unbiased bases as JSON.")
    mub.add_argument("--dim", type=int, required=True, help=f"One of {', '.join(map(str, SUPPORTED_DIMENSIONS))}.")
    mub.add_argument("--theta", type=float)
    mub.add_argument("--phi", type=float)
    mub.set_defaults(handler=cmd_mub)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings(args.config).merged(
            {
                "log_level": args.log_level,
                "grid_theta": args.grid_theta,
                "grid_phi": args.grid_phi,
                "tolerance": args.tolerance,
                "seed": args.seed,
            }
        )
        logging.getLogger("src").setLevel(settings.log_level)
        return args.handler(args, settings)
    except (NaqcError, ValidationError, ValueError, OSError) as exc:
        logger.error(f"{args.command}: {' '.join(str(exc).split())}")
        return EXIT_ERROR
