"""Non-rigorous floating-point pipeline used for exploration and cross-checks.

Every number produced here is an estimate: trajectories are computed with
an adaptive high-order Runge-Kutta method (DOP853) on the same real field
code the rigorous evaluator uses, started from the midpoints of the
shooting boxes.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import NoCrossing
from .problems import ProblemSpec
from .shooting import ShootingConfig
from .stokes import series_factor
from .interval import Interval

__all__ = ["OracleHit", "OracleResult", "oracle_transport", "oracle_delta"]

RTOL = 1e-13
ATOL = 1e-18


@dataclass(frozen=True)
class OracleHit:
    state: np.ndarray
    time: float  # signed: negative for backward transports


@dataclass(frozen=True)
class OracleResult:
    rho: float
    delta_phi: complex
    delta_varphi: complex
    kappa0: complex
    theta: complex  # kappa0 times the series factor when refinement data exist
    hit_minus: OracleHit
    hit_plus: OracleHit
    s2_plus_start: float

    def to_json(self) -> dict:
        def c(z):
            return [repr(z.real), repr(z.imag)]

        return {
            "rigorous": False,
            "rho": repr(self.rho),
            "delta_phi": c(self.delta_phi),
            "delta_varphi": c(self.delta_varphi),
            "kappa0": c(self.kappa0),
            "theta": c(self.theta),
            "s2_plus_start": repr(self.s2_plus_start),
        }


def _rhs(p: ProblemSpec, sign: float):
    f = p.field.real_rhs

    def rhs(_t, y):
        return [sign * v for v in f(list(y))]

    return rhs


def oracle_transport(
    p: ProblemSpec, start, direction: str = "forward", max_time: float = 1e4, rtol: float = RTOL, atol: float = ATOL
) -> OracleHit:
    """First crossing of s1 = 0 from a point, forward (s1 < 0) or backward (s1 > 0)."""
    sign = 1.0 if direction == "forward" else -1.0
    y0 = np.asarray(start, dtype=float)

    def event(_t, y):
        return y[4]

    event.terminal = True
    sol = solve_ivp(_rhs(p, sign), (0.0, max_time), y0, method="DOP853", rtol=rtol, atol=atol, events=event)
    if sol.t_events[0].size == 0:
        raise NoCrossing(f"oracle: no crossing within {max_time} time units")
    y = sol.y_events[0][0].copy()
    y[4] = 0.0
    return OracleHit(y, sign * float(sol.t_events[0][0]))


def oracle_delta(p: ProblemSpec, cfg: ShootingConfig = ShootingConfig(), refine: Optional[bool] = None) -> OracleResult:
    """Midpoint shooting: align the P^+ start height so both hits share s2."""
    hit_minus = oracle_transport(p, [0, 0, 0, 0, cfg.s_minus[0], cfg.s_minus[1]], "forward")
    target = hit_minus.state[5]

    def plus_hit(s2):
        return oracle_transport(p, [0, 0, 0, 0, cfg.s_plus_re, s2], "backward")

    def mismatch(s2):
        return plus_hit(s2).state[5] - target

    lo, hi = -cfg.rho_bar - cfg.half_width, -cfg.rho_bar + cfg.half_width
    s2_star = brentq(mismatch, lo, hi, xtol=1e-15)
    hit_plus = plus_hit(s2_star)
    d = hit_plus.state - hit_minus.state
    delta_phi = complex(d[0], d[1])
    delta_varphi = complex(d[2], d[3])
    rho = -float(target)
    led = p.ledger
    phase = led.alpha * (rho - 1j * led.h0 * np.log(rho) - led.h0 * np.pi / 2)
    k0 = 1j * cmath.exp(phase) * delta_phi / rho
    use_refine = p.refinement_data is not None and led.h0 == 0.0 if refine is None else refine
    theta = k0 * series_factor(p.refinement_data.beta, Interval(rho)).mid() if use_refine else k0
    return OracleResult(rho, delta_phi, delta_varphi, k0, theta, hit_minus, hit_plus, float(s2_star))
