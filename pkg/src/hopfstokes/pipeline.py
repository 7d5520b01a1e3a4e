"""End-to-end certification run and the certificate it produces."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import __version__
from .constants import ConstantTable, m0_bound
from .errors import ThresholdError
from .flow import FlowConfig
from .interval import ComplexInterval, Interval
from .problems import ProblemSpec
from .shooting import DeltaEnclosure, ShootingConfig, enclose_delta
from .stokes import RefinedTheta, check_psi_star_identities, kappa0, theta_basic, theta_refined
from .thresholds import RhoThresholds, find_thresholds, verify_at

__all__ = ["SCHEMA_VERSION", "NONZERO_CERTIFIED", "INCONCLUSIVE", "ScanConfig", "StokesCertificate", "certify", "emit_certificate"]

SCHEMA_VERSION = "1.0"
NONZERO_CERTIFIED = "NONZERO_CERTIFIED"
INCONCLUSIVE = "INCONCLUSIVE"

NOTES = (
    "Disc-shaped error bounds (|g| <= Mbar, |ET|) are enclosed by the circumscribed axis-aligned rectangle.",
    "The kappa0 factor in the ES bound is read as |kappa0|: only the modulus is meaningful in a modulus bound.",
    "The (x, y) balls |phi|, |varphi| <= M0 |Re s|^-3 around the start points are enclosed by coordinate cubes.",
    "The refined error adds the exact tail of the K11 polynomial (from exact psi_* products) to the B14 term.",
)


@dataclass(frozen=True)
class ScanConfig:
    scan_start: float = 2.5
    scan_factor: float = 1.25
    max_iters: int = 200


@dataclass(frozen=True)
class StokesCertificate:
    problem: str
    thresholds: RhoThresholds
    table: ConstantTable
    delta: DeltaEnclosure
    kappa0: ComplexInterval
    mbar: Interval
    theta_basic: ComplexInterval
    theta_refined: Optional[RefinedTheta]
    conclusion: str
    parameters: dict = field(default_factory=dict)
    identity_report: Optional[dict] = None

    def to_json(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "hopfstokes", "version": __version__},
            "problem": self.problem,
            "parameters": self.parameters,
            "thresholds": self.thresholds.to_json(),
            "constants": self.table.to_json(),
            "delta": self.delta.to_json(),
            "kappa0": {"label": "kappa0 = i e^(alpha rho) Delta phi(-i rho_*) / rho_*", "value": self.kappa0.to_json()},
            "mbar": {"label": "Mbar = A1 / (1 - A) at rho_*", "value": self.mbar.to_json()},
            "theta_basic": {"label": "Theta in kappa0 (1 + g), |g| <= Mbar", "value": self.theta_basic.to_json()},
            "theta_refined": None if self.theta_refined is None else self.theta_refined.to_json(),
            "conclusion": self.conclusion,
            "notes": list(NOTES),
        }
        if self.identity_report is not None:
            out["psi_star_identities"] = self.identity_report
        return out


def conclusion_for(delta: DeltaEnclosure, basic: ComplexInterval) -> str:
    return NONZERO_CERTIFIED if (delta.nonzero_certified or not basic.contains_zero()) else INCONCLUSIVE


def certify(
    p: ProblemSpec,
    shooting: ShootingConfig = ShootingConfig(),
    flow: FlowConfig = FlowConfig(),
    scan: ScanConfig = ScanConfig(),
    refine: bool = False,
    workers: Optional[int] = None,
    log: Optional[Callable[[str], None]] = None,
) -> StokesCertificate:
    """Thresholds, shooting, kappa0 and Theta enclosures for one problem."""
    say = log or (lambda _msg: None)
    thresholds = find_thresholds(p, scan.scan_start, scan.scan_factor, scan.max_iters)
    say(f"thresholds: {thresholds}")
    if not shooting.rho_bar >= thresholds.rho0:
        raise ThresholdError(f"rho_bar = {shooting.rho_bar} is below rho0 = {thresholds.rho0}", gate="rho0")
    m0 = m0_bound(p, Interval(shooting.rho_bar))
    delta = enclose_delta(p, shooting, m0, flow, workers=workers, log=say)
    rho = delta.rho_star_enc
    if not rho.lo >= thresholds.rho0:
        raise ThresholdError(f"rho_* = {rho} is not above rho0 = {thresholds.rho0}", gate="rho0")
    table = verify_at(p, rho)
    k0 = kappa0(p, rho, delta.delta_phi)
    basic = theta_basic(k0, table.mbar)
    refined = None
    report = None
    if refine:
        refined = theta_refined(p, table, rho, k0)
        report = check_psi_star_identities(p.refinement_data).to_json()
    params = {
        "shooting": shooting.to_json(),
        "flow": {k: repr(v) for k, v in sorted(vars(flow).items())},
        "scan": {k: repr(v) for k, v in sorted(vars(scan).items())},
        "mode": "refine" if refine else "verify",
    }
    return StokesCertificate(
        problem=p.name,
        thresholds=thresholds,
        table=table,
        delta=delta,
        kappa0=k0,
        mbar=table.mbar,
        theta_basic=basic,
        theta_refined=refined,
        conclusion=conclusion_for(delta, basic),
        parameters=params,
        identity_report=report,
    )


def emit_certificate(cert: StokesCertificate) -> str:
    """Deterministic JSON text of the certificate."""
    return json.dumps(cert.to_json(), indent=2, sort_keys=True) + "\n"
