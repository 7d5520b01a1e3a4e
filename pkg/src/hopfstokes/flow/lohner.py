"""Validated transport of state boxes to the section {s1 = 0}.

One step of the method, for the set ``x̄ + C r0 + B r``:

* Taylor coefficients of the centre x̄ and of the hull X (with jets) are
  computed in complex ball arithmetic.
* An a priori enclosure W of all trajectories over [0, h] is validated by
  the high-order enclosure test
  ``sum_{i<p} [0,h]^i T_i(X) + [0,h]^p T_p(W) ⊂ int W``.
* The image is ``T(x̄) + h^{p+1} T_{p+1}(W) + J (C r0 + B r)`` with
  ``J = sum_i h^i DT_i(X)`` (mean value form of the Taylor polynomial).
* C is propagated by its midpoint product; B is re-orthogonalised by QR and
  the remaining terms are folded into r through a rigorous inverse of Q.

Regular steps never let W touch the section, which proves that no crossing
happens before the final step.  The final step solves for the crossing
time with one interval Newton step ``t ∈ -s1 / s1'(W)``, giving a box hit.
That hit is sharpened by the mean value form of the Poincare map,
``P(x̄) + DP (C r0 + B r)`` with ``DP = (I - f e_s1^T / f_s1) DxPhi``, which
keeps the correlation between a start point and its own crossing time; the
result is intersected with the box hit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import DomainError, IntegrationError, NoCrossing, WrappingFailure
from ..interval import Interval, exp
from ..problems import ProblemSpec
from ..state import StateBox
from . import linalg as la
from .taylor import TaylorTape, U

__all__ = ["FlowConfig", "SectionHit", "integrate", "poincare_minus", "poincare_plus"]

S1 = 4  # index of s1 in the real state


@dataclass(frozen=True)
class FlowConfig:
    """Integrator knobs.

    ``tol`` is the absolute size targeted for the last Taylor term; ``width_cap``
    aborts when the hull of the transported set gets wider than this.
    ``h_max`` caps the step: ball evaluation of the rotating (x, y) part
    overestimates the Jacobian by roughly a factor e^h, which feeds the
    quadratic s-coupling.
    """

    order: int = 20
    tol: float = 1e-17
    width_cap: float = 1e-3
    max_time: float = 1e4
    max_steps: int = 100_000
    landing: float = 0.05
    h_min: float = 1e-6
    h_max: float = 0.5
    inflate_rel: float = 1e-3

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("order must be at least 2")
        if not (self.tol > 0 and self.width_cap > 0 and self.landing > 0):
            raise ValueError("tol, width_cap and landing must be positive")


@dataclass(frozen=True)
class SectionHit:
    """Enclosure of the first section crossing of a set of initial states."""

    state: StateBox
    time_enclosure: Interval
    s1_rate: Interval  # s1' over the crossing step, bounded away from 0
    steps: int

    def __post_init__(self):
        if not (self.state.s1.lo == 0.0 and self.state.s1.hi == 0.0):
            raise ValueError("a section hit must have s1 = [0, 0]")
        if 0.0 in self.s1_rate:
            raise ValueError("transversality witness contains 0")

    def to_json(self) -> dict:
        return {
            "state": self.state.to_json(),
            "time": self.time_enclosure.to_json(),
            "s1_rate": self.s1_rate.to_json(),
            "steps": self.steps,
        }


_TAPES: dict = {}


def _tape(p: ProblemSpec, sign: float) -> TaylorTape:
    key = (id(p.field.complex_rhs), sign)
    tape = _TAPES.get(key)
    if tape is None:
        tape = TaylorTape(p.field.complex_rhs, nvars=3, sign=sign)
        _TAPES[key] = (tape, p.field)  # keep the field alive so id() stays unique
        return tape
    return tape[0]


class _Transport:
    def __init__(self, p: ProblemSpec, cfg: FlowConfig, sign: float, trace: Optional[Callable[[str], None]]):
        self.cfg = cfg
        self.sign = sign  # +1: forward from s1 < 0; -1: backward from s1 > 0
        self.tape = _tape(p, sign)
        self.trace = trace
        self.p = cfg.order
        self.K = cfg.order + 2  # coefficients 0..p+1

    # -- Taylor coefficients as real rectangles --------------------------
    def _series(self, lo, hi, jets):
        cm, cr = la.rects_to_discs(lo, hi)
        return self.tape.series(cm, cr, self.K - 1, jets=jets)

    @staticmethod
    def _coeff_rects(cm, cr):
        """(K, B, 3, L) balls, lane 0 -> (K, B, 6) rectangles."""
        return la.discs_to_rects(cm[..., 0], cr[..., 0])

    # -- a priori enclosure ---------------------------------------------
    def _hoe(self, tlo, thi, h, check_side):
        """Validate W over [0, h] for the box whose coefficients are (tlo, thi).

        Returns (Wlo, Whi, W coefficient rectangles) or None.
        """
        p = self.p
        hp = la.power_upper(h, self.K)
        elo, ehi = tlo[0], thi[0]
        for i in range(1, p):
            a, b = la.rect_scale_0h(tlo[i], thi[i], hp[i])
            elo, ehi = la.rect_add(elo, ehi, a, b)
        base_lo, base_hi = elo, ehi
        a, b = la.rect_scale_0h(tlo[p], thi[p], hp[p])
        elo, ehi = la.rect_add(elo, ehi, a, b)
        rel = self.cfg.inflate_rel
        for _ in range(4):
            pad = rel * (ehi - elo) + 1e-13 * np.maximum(np.abs(elo), np.abs(ehi)) + 1e-290
            wlo, whi = elo - pad, ehi + pad
            if check_side and not self._strict_side(wlo, whi):
                return None
            try:
                wm, wr = self._series(wlo[None], whi[None], jets=False)
            except DomainError:
                return None
            wclo, wchi = self._coeff_rects(wm, wr)
            wclo, wchi = wclo[:, 0], wchi[:, 0]
            a, b = la.rect_scale_0h(wclo[p], wchi[p], hp[p])
            test_lo, test_hi = la.rect_add(base_lo, base_hi, a, b)
            if np.all(test_lo > wlo) and np.all(test_hi < whi):
                return wlo, whi, wclo, wchi
            elo, ehi = la.rect_hull(wlo, whi, test_lo, test_hi)
            rel *= 4.0
        return None

    def _strict_side(self, lo, hi) -> bool:
        return bool(hi[S1] < 0.0) if self.sign > 0 else bool(lo[S1] > 0.0)

    # -- main loop --------------------------------------------------------
    def run(self, start: StateBox) -> SectionHit:
        cfg = self.cfg
        lo0 = np.array(start.lo())
        hi0 = np.array(start.hi())
        xbar, r0r = la.rect_to_midrad(lo0, hi0)
        # r0 is the exact displacement box start - xbar, stored as mid-rad
        r0lo, r0hi = np.nextafter(lo0 - xbar, -np.inf), np.nextafter(hi0 - xbar, np.inf)
        r0m, r0r = la.rect_to_midrad(r0lo, r0hi)
        C = np.eye(6)
        B = np.eye(6)
        rm = np.zeros(6)
        rr = np.zeros(6)

        elapsed = Interval(0.0)
        h_prev = None
        steps = 0
        while True:
            xlo, xhi = self._hull(xbar, C, r0m, r0r, B, rm, rr)
            if not self._strict_side(xlo, xhi):
                raise DomainError("transported set reached the section during a regular step")
            width = float(np.max(xhi - xlo))
            if width > cfg.width_cap:
                raise WrappingFailure(f"enclosure width {width:.3e} exceeds cap {cfg.width_cap:.1e} after {steps} steps")
            if abs(xbar[S1]) <= 1.5 * cfg.landing:
                break
            if steps >= cfg.max_steps or elapsed.lo > cfg.max_time:
                raise NoCrossing(f"no crossing of s1 = 0 within {elapsed.hi:.4g} time units / {steps} steps")

            batch_lo = np.stack([xbar, xlo])
            batch_hi = np.stack([xbar, xhi])
            cm, cr = self._series(batch_lo, batch_hi, jets=True)
            tlo, thi = self._coeff_rects(cm, cr)
            h = self._propose_h(cm, cr, xbar, h_prev)
            hoe = None
            while hoe is None:
                hoe = self._hoe(tlo[:, 1], thi[:, 1], h, check_side=True)
                if hoe is None:
                    h *= 0.5
                    if h < cfg.h_min:
                        raise WrappingFailure(f"a priori enclosure failed down to h = {h:.2e}")
            _, _, wclo, wchi = hoe

            # image of the centre plus remainder
            ym, yr = la.ball_poly(cm[: self.p + 1, 0, :, 0], cr[: self.p + 1, 0, :, 0], h)
            ylo, yhi = la.discs_to_rects(ym, yr)
            hp1 = la.power_upper(h, self.K)[self.p + 1]
            rlo, rhi = la.rect_scale_0h(wclo[self.p + 1], wchi[self.p + 1], hp1)
            ylo, yhi = la.rect_add(ylo, yhi, rlo, rhi)

            # Jacobian of the Taylor polynomial over X
            jm_c, jr_c = la.ball_poly(cm[: self.p + 1, 1, :, 1:], cr[: self.p + 1, 1, :, 1:], h)
            jm, jr = la.realify(jm_c, jr_c)

            xbar_new, zr = la.rect_to_midrad(ylo, yhi)
            zlo, zhi = np.nextafter(ylo - xbar_new, -np.inf), np.nextafter(yhi - xbar_new, np.inf)
            zm, zr = la.rect_to_midrad(zlo, zhi)

            C_new = jm @ C
            _, jc_r = la.matmul(jm, jr, C, None)
            dm, dr = la.matmul(np.zeros((6, 6)), jc_r, r0m, r0r)  # (JC - C_new) r0
            wm, wr = la.vadd(zm, zr, dm, dr)

            am, ar = la.matmul(jm, jr, B, None)
            Q, qinv_m, qinv_r = _orthonormal_frame(am, rm, rr)
            mm, mr = la.matmul(qinv_m, qinv_r, am, ar)
            v1m, v1r = la.matmul(mm, mr, rm, rr)
            v2m, v2r = la.matmul(qinv_m, qinv_r, wm, wr)
            rm, rr = la.vadd(v1m, v1r, v2m, v2r)
            xbar, C, B = xbar_new, C_new, Q

            elapsed = elapsed + h
            steps += 1
            h_prev = h
            if self.trace is not None:
                self.trace(
                    f"step {steps:5d} t={elapsed.mid():.6f} h={h:.5f} s=({xbar[4]:.6f},{xbar[5]:.9f}) "
                    f"width={width:.3e}"
                )

        return self._cross(xlo, xhi, elapsed, steps, (xbar, C, r0m, r0r, B, rm, rr))

    def _hull(self, xbar, C, r0m, r0r, B, rm, rr):
        v1m, v1r = la.matmul(C, None, r0m, r0r)
        v2m, v2r = la.matmul(B, None, rm, rr)
        sm, sr = la.vadd(v1m, v1r, v2m, v2r)
        tm, tr = la.vadd(xbar, np.zeros(6), sm, sr)
        lo, hi = la.midrad_to_rect(tm, tr)
        return np.minimum(lo, xbar), np.maximum(hi, xbar)

    def _propose_h(self, cm, cr, xbar, h_prev):
        cfg = self.cfg
        p = self.p
        norms = np.max(np.abs(cm[:, 0, :, 0]) + cr[:, 0, :, 0], axis=1)
        cands = []
        for k in (p - 1, p):
            if norms[k] > 0:
                cands.append((cfg.tol / norms[k]) ** (1.0 / k))
        h = 0.9 * min(cands) if cands else 1.0
        s_abs = abs(complex(xbar[4], xbar[5]))
        h = min(h, 0.3 * s_abs, cfg.h_max)
        if h_prev is not None:
            h = min(h, 2.0 * h_prev)
        # land at distance `landing` from the section
        rate = abs(cm[1, 0, 2, 0].real)
        dist = abs(xbar[S1]) - cfg.landing
        if rate > 0 and dist / rate <= h:
            h = dist / rate
        return max(h, cfg.h_min)

    def _cross_box(self, xlo, xhi):
        """Crossing of a box: hit rectangle, crossing time, s1' and the a priori enclosure."""
        s1 = Interval(float(xlo[S1]), float(xhi[S1]))
        if self.sign > 0 and not s1.hi < 0.0 or self.sign < 0 and not s1.lo > 0.0:
            raise DomainError(f"crossing start not strictly before the section: s1 = {s1}")
        cm, cr = self._series(xlo[None], xhi[None], jets=False)
        tlo, thi = self._coeff_rects(cm, cr)
        tlo, thi = tlo[:, 0], thi[:, 0]
        rate_guess = max(abs(float(cm[1, 0, 2, 0].real)), 1e-300)
        tmax = 1.25 * s1.mag() / rate_guess + 1e-9
        for _ in range(8):
            hoe = self._hoe(tlo, thi, tmax, check_side=False)
            if hoe is None:
                raise WrappingFailure("a priori enclosure failed on the crossing step")
            wlo, whi, wclo, wchi = hoe
            rate = Interval(float(wclo[1, S1]), float(wchi[1, S1]))
            if 0.0 in rate:
                raise DomainError(f"transversality not verified: s1' over the crossing step is {rate}")
            t = -s1 / rate
            if t.lo <= 0.0:
                raise DomainError(f"crossing time not positive: {t}")
            if t.hi <= tmax:
                break
            tmax = 1.25 * t.hi
        else:
            raise NoCrossing("could not bracket the crossing time")
        p = self.p
        lo_p = la.power_lower(t.lo, self.K)
        hi_p = la.power_upper(t.hi, self.K)
        ylo, yhi = tlo[0], thi[0]
        for i in range(1, p + 1):
            a, b = la.rect_scale_pos(tlo[i], thi[i], lo_p[i], hi_p[i])
            ylo, yhi = la.rect_add(ylo, yhi, a, b)
        a, b = la.rect_scale_pos(wclo[p + 1], wchi[p + 1], lo_p[p + 1], hi_p[p + 1])
        ylo, yhi = la.rect_add(ylo, yhi, a, b)
        ylo[S1], yhi[S1] = 0.0, 0.0
        return ylo, yhi, t, rate, wlo, whi

    def _flow_jacobian(self, xlo, xhi, t: Interval, wlo, whi):
        """Real 6x6 rectangle containing D_x phi(tau, x) for tau in [t], x in X.

        Taylor part sum_i [t]^i DT_i(X); the remainder t^(p+1) DT_{p+1}(W) V
        uses |V| <= exp(t L) with L the row-sum norm of Df over W.
        """
        p = self.p
        cm, cr = self._series(xlo[None], xhi[None], jets=True)
        lo_p = la.power_lower(t.lo, self.K)
        hi_p = la.power_upper(t.hi, self.K)
        mlo, mhi = la.midrad_to_rect(*la.realify(cm[0, 0, :, 1:], cr[0, 0, :, 1:]))
        for i in range(1, p + 1):
            dlo, dhi = la.midrad_to_rect(*la.realify(cm[i, 0, :, 1:], cr[i, 0, :, 1:]))
            a, b = la.rect_scale_pos(dlo, dhi, lo_p[i], hi_p[i])
            mlo, mhi = la.rect_add(mlo, mhi, a, b)
        wm, wr = self._series(wlo[None], whi[None], jets=True)
        am, ar = la.realify(wm[p + 1, 0, :, 1:], wr[p + 1, 0, :, 1:])
        jm, jr = la.realify(wm[1, 0, :, 1:], wr[1, 0, :, 1:])
        lip = float(la.up(np.max(np.sum(np.abs(jm) + jr, axis=1))))
        growth = exp(Interval(t.hi) * lip).hi
        bound = la.up(la.up(np.sum(np.abs(am) + ar, axis=1)) * growth * hi_p[p + 1])
        return np.nextafter(mlo - bound[:, None], -np.inf), np.nextafter(mhi + bound[:, None], np.inf)

    def _mean_value_hit(self, frame, xlo, xhi, t: Interval, wlo, whi, ylo, yhi):
        """Hit enclosure P(xbar) + DP (C r0 + B r) with DP = (I - f e_s1^T / f_s1) D_x phi.

        The mean value form keeps the correlation between a point and its
        crossing time that the box evaluation over [t] loses.
        """
        xbar, C, r0m, r0r, B, rm, rr = frame
        p0lo, p0hi, *_ = self._cross_box(xbar.copy(), xbar.copy())
        mlo, mhi = self._flow_jacobian(xlo, xhi, t, wlo, whi)
        fm, fr = self._series(ylo[None], yhi[None], jets=False)
        flo, fhi = self._coeff_rects(fm, fr)
        f = [Interval(float(a), float(b)) for a, b in zip(flo[1, 0], fhi[1, 0])]
        M = [[Interval(float(mlo[i, j]), float(mhi[i, j])) for j in range(6)] for i in range(6)]
        glo = np.zeros((6, 6))
        ghi = np.zeros((6, 6))
        for i in range(6):
            if i == S1:
                continue  # this row of DP vanishes identically
            q = f[i] / f[S1]
            for j in range(6):
                g = M[i][j] - q * M[S1][j]
                glo[i, j], ghi[i, j] = g.lo, g.hi
        gm, gr = la.rect_to_midrad(glo, ghi)
        gcm, gcr = la.matmul(gm, gr, C, None)
        v1m, v1r = la.matmul(gcm, gcr, r0m, r0r)
        gbm, gbr = la.matmul(gm, gr, B, None)
        v2m, v2r = la.matmul(gbm, gbr, rm, rr)
        dlo, dhi = la.midrad_to_rect(*la.vadd(v1m, v1r, v2m, v2r))
        hlo, hhi = la.rect_add(p0lo, p0hi, dlo, dhi)
        hlo[S1], hhi[S1] = 0.0, 0.0
        return hlo, hhi

    def _cross(self, xlo, xhi, elapsed: Interval, steps: int, frame=None) -> SectionHit:
        """Final step from a box near the section onto {s1 = 0}."""
        ylo, yhi, t, rate, wlo, whi = self._cross_box(xlo, xhi)
        if frame is not None:
            hlo, hhi = self._mean_value_hit(frame, xlo, xhi, t, wlo, whi, ylo, yhi)
            ylo, yhi = np.maximum(ylo, hlo), np.minimum(yhi, hhi)
            if np.any(ylo > yhi):
                raise IntegrationError("box and mean value enclosures of the hit are disjoint")
        comps = [Interval(float(a), float(b)) for a, b in zip(ylo, yhi)]
        total = elapsed + t
        if self.sign < 0:
            total = -total
            rate = -rate
        return SectionHit(StateBox.from_components(comps), total, rate, steps + 1)


def _orthonormal_frame(am, rm, rr):
    """Q from a QR factorisation of mid(A) and a rigorous enclosure of Q^{-1}."""
    extent = np.linalg.norm(am, axis=0) * (np.abs(rm) + rr)
    perm = np.argsort(-extent, kind="stable")
    Q, _ = np.linalg.qr(am[:, perm])
    qt = Q.T
    g_m, g_r = la.matmul(qt, None, Q, None)
    e = np.abs(np.eye(6) - g_m) + g_r
    eps = la.up(float(np.max(e.sum(axis=1))) * (1 + 8 * U))
    if not eps < 0.5:
        raise WrappingFailure("orthonormal frame is too far from orthogonal")
    qt_norm = float(np.max(np.abs(qt).sum(axis=1))) * (1 + 8 * U)
    delta = la.up(eps / (1.0 - eps) * qt_norm * (1 + 8 * U))
    return Q, qt, np.full((6, 6), delta)


def integrate(
    p: ProblemSpec,
    start: StateBox,
    direction: str = "forward",
    config: FlowConfig = FlowConfig(),
    trace: Optional[Callable[[str], None]] = None,
) -> SectionHit:
    """First crossing of {s1 = 0} for every point of ``start``.

    ``direction='forward'`` needs ``start.s1 < 0``; ``'backward'`` needs
    ``start.s1 > 0``.  ``trace`` receives one line per step.
    """
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    sign = 1.0 if direction == "forward" else -1.0
    if sign > 0 and not start.s1.hi < 0.0:
        raise DomainError(f"forward transport needs s1 < 0 on the start box, got {start.s1}")
    if sign < 0 and not start.s1.lo > 0.0:
        raise DomainError(f"backward transport needs s1 > 0 on the start box, got {start.s1}")
    return _Transport(p, config, sign, trace).run(start)


def poincare_minus(p: ProblemSpec, pminus: StateBox, config: FlowConfig = FlowConfig(), trace=None) -> SectionHit:
    """P^-: forward transport from s1 < 0 to the section."""
    return integrate(p, pminus, "forward", config, trace=trace)


def poincare_plus(p: ProblemSpec, pplus: StateBox, config: FlowConfig = FlowConfig(), trace=None) -> SectionHit:
    """P^+: backward transport from s1 > 0 to the section."""
    return integrate(p, pplus, "backward", config, trace=trace)
