"""Command-line driver.

Exit codes: 0 certified, 2 inconclusive, 3 threshold or gate failure,
4 integrator failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .errors import DomainError, IntegrationError, StokesError
from .flow import FlowConfig
from .pipeline import INCONCLUSIVE, ScanConfig, certify, emit_certificate
from .problems import PROBLEMS, get_problem
from .shooting import ShootingConfig
from .thresholds import find_thresholds

log = logging.getLogger("hopfstokes")

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_GATE, EXIT_INTEGRATOR = 0, 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopfstokes", description="Validated enclosures of the Stokes constant.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one problem")
    run.add_argument("--problem", choices=sorted(PROBLEMS), required=True)
    run.add_argument("--mode", choices=["verify", "refine", "thresholds", "oracle"], default="verify")
    run.add_argument("--out", help="write the certificate (JSON) here")
    run.add_argument("--scan-start", type=float, default=2.5)
    run.add_argument("--scan-factor", type=float, default=1.25)
    run.add_argument("--max-iters", type=int, default=200)
    run.add_argument("--rho-bar", type=float, default=16.00008679)
    run.add_argument("--re-s", type=float, default=1000.0, help="|Re s| of both shooting start points")
    run.add_argument("--half-width", type=float, default=1e-6)
    run.add_argument("--subdivide", type=int, default=1)
    run.add_argument("--order", type=int, default=20)
    run.add_argument("--tol", type=float, default=1e-17)
    run.add_argument("--width-cap", type=float, default=1e-3)
    run.add_argument("--h-max", type=float, default=0.5)
    run.add_argument("--workers", type=int, default=None, help="parallel transports (default: $STOKES_THREADS or 1)")
    run.add_argument("--trace", action="store_true", help="log progress")
    return parser


def _write(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_report(exc: StokesError, code: int) -> str:
    report = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    for attr in ("gate", "comparison"):
        if getattr(exc, attr, None) is not None:
            report[attr] = getattr(exc, attr)
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def run(args: argparse.Namespace) -> int:
    p = get_problem(args.problem)
    scan = ScanConfig(args.scan_start, args.scan_factor, args.max_iters)
    shooting = ShootingConfig.symmetric(args.re_s, args.rho_bar, args.half_width, args.subdivide)
    if args.mode == "thresholds":
        th = find_thresholds(p, scan.scan_start, scan.scan_factor, scan.max_iters)
        _write(json.dumps({"problem": p.name, "thresholds": th.to_json()}, indent=2, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    if args.mode == "oracle":
        from .oracle import oracle_delta

        res = oracle_delta(p, shooting)
        print(f"NON-RIGOROUS oracle estimate for {p.name} (floating point, not a proof)")
        print(f"  rho_*   ~ {res.rho:.10f}")
        print(f"  dphi    ~ {res.delta_phi.real:.6e} {res.delta_phi.imag:+.6e}i")
        print(f"  kappa0  ~ {res.kappa0.real:.8f} {res.kappa0.imag:+.8f}i")
        print(f"  Theta   ~ {res.theta.real:.8f} {res.theta.imag:+.8f}i")
        if args.out:
            _write(json.dumps({"problem": p.name, "oracle": res.to_json()}, indent=2, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    if args.mode == "refine" and p.refinement_data is None:
        raise SystemExit(f"refine mode needs refinement data; {p.name} has none")
    flow = FlowConfig(order=args.order, tol=args.tol, width_cap=args.width_cap, h_max=args.h_max)
    say = log.info if args.trace else None
    cert = certify(p, shooting, flow, scan, refine=args.mode == "refine", workers=args.workers, log=say)
    _write(emit_certificate(cert), args.out)
    if args.out:
        print(f"{p.name}: {cert.conclusion}")
        print(f"  theta_basic   = {cert.theta_basic}")
        if cert.theta_refined is not None:
            print(f"  theta_refined = {cert.theta_refined.theta}")
    return EXIT_INCONCLUSIVE if cert.conclusion == INCONCLUSIVE else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "trace", False) else logging.WARNING, format="%(message)s")
    try:
        return run(args)
    except (IntegrationError, DomainError) as exc:
        code = EXIT_INTEGRATOR if isinstance(exc, IntegrationError) or args.mode in ("verify", "refine") else EXIT_GATE
        sys.stderr.write(_error_report(exc, code))
        return code
    except StokesError as exc:
        sys.stderr.write(_error_report(exc, EXIT_GATE))
        return EXIT_GATE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
