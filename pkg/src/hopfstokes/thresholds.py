"""Search for the validated thresholds rho1 <= rho2 <= rho_star <= rho0.

Monotonicity of the gate quantities in rho is never assumed: each threshold
is located on a geometric grid, sharpened by bisection, and the condition is
re-verified at the returned value itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .constants import ConstantTable, constant_table, contraction_a, lipschitz, m_matrix
from .errors import SearchExhausted, ThresholdError
from .interval import Interval
from .problems import ProblemSpec

__all__ = ["RhoThresholds", "find_thresholds", "verify_at", "gate_rho1", "gate_min_m0", "gate_lipschitz", "gate_contraction"]

BISECTION_TOL = 1e-3


@dataclass(frozen=True)
class RhoThresholds:
    rho1: float
    rho2: float
    rho_star: float
    rho0: float

    def __post_init__(self):
        if not (self.rho1 <= self.rho2 <= self.rho_star <= self.rho0):
            raise ValueError(f"thresholds out of order: {self}")

    def to_json(self) -> dict:
        return {k: repr(getattr(self, k)) for k in ("rho1", "rho2", "rho_star", "rho0")}


# Each gate returns normally when its condition is certified at rho and raises
# ThresholdError otherwise.


def gate_rho1(p: ProblemSpec, rho: Interval) -> None:
    floor = max(2.0, p.ledger.cH0bar)
    if not rho.lo > floor:
        raise ThresholdError(f"rho = {rho} not above max(2, C_H0bar) = {floor}", gate="rho1")


def gate_min_m0(p: ProblemSpec, rho: Interval) -> None:
    gate_rho1(p, rho)
    m_matrix(p, rho)


def gate_lipschitz(p: ProblemSpec, rho: Interval) -> None:
    gate_min_m0(p, rho)
    _, _, l = lipschitz(p, rho)
    if not l.hi <= 0.5:
        raise ThresholdError(f"L(rho) = {l} not certified <= 1/2 at rho = {rho}", gate="L<=1/2")


def gate_contraction(p: ProblemSpec, rho: Interval) -> None:
    gate_lipschitz(p, rho)
    _, _, a = contraction_a(p, rho)
    if not a.hi < 0.5:
        raise ThresholdError(f"A(rho) = {a} not certified < 1/2 at rho = {rho}", gate="A<1/2")


def _passes(gate: Callable[[ProblemSpec, Interval], None], p: ProblemSpec, rho: float) -> bool:
    try:
        gate(p, Interval(rho))
    except ThresholdError:
        return False
    return True


def _first_passing(gate, p: ProblemSpec, start: float, factor: float, max_iters: int, name: str) -> float:
    prev_fail = None
    rho = start
    for _ in range(max_iters):
        if _passes(gate, p, rho):
            break
        prev_fail = rho
        rho *= factor
    else:
        raise SearchExhausted(f"{name}: condition not verified within {max_iters} grid points from {start}", gate=name)
    if prev_fail is not None:
        lo, hi = prev_fail, rho
        while hi - lo > BISECTION_TOL:
            mid = 0.5 * (lo + hi)
            if _passes(gate, p, mid):
                hi = mid
            else:
                lo = mid
        rho = hi
    gate(p, Interval(rho))  # direct re-verification at the returned value
    return rho


def find_thresholds(p: ProblemSpec, scan_start: float = 2.5, scan_factor: float = 1.25, max_iters: int = 200) -> RhoThresholds:
    """Locate rho1, rho2, rho_star and rho0 on a geometric grid from ``scan_start``."""
    floor = max(2.0, p.ledger.cH0bar)
    if not scan_start > floor:
        raise ValueError(f"scan_start must exceed max(2, C_H0bar) = {floor}")
    if not scan_factor > 1.0:
        raise ValueError("scan_factor must be > 1")
    rho1 = _first_passing(gate_rho1, p, scan_start, scan_factor, max_iters, "rho1")
    rho2 = _first_passing(gate_min_m0, p, rho1, scan_factor, max_iters, "minM0")
    rho_star = _first_passing(gate_lipschitz, p, rho2, scan_factor, max_iters, "L<=1/2")
    rho0 = _first_passing(gate_contraction, p, rho_star, scan_factor, max_iters, "A<1/2")
    return RhoThresholds(rho1, rho2, rho_star, rho0)


def verify_at(p: ProblemSpec, rho: Interval | float) -> ConstantTable:
    """Full constant table at ``rho`` with every gate checked; raises on any failure."""
    rho = rho if isinstance(rho, Interval) else Interval(rho)
    gate_contraction(p, rho)
    return constant_table(p, rho)
