"""Bolzano shooting: validated enclosures of rho_* and Delta psi(-i rho_*).

The unstable solution psi^- lies in the box p^- over s^- = (-R, -rho_bar);
the stable solution psi^+ lies in the box p^+ over the vertical segment
{R} x [-rho_bar - w, -rho_bar + w].  Both are transported to the section
{s1 = 0}.  If the images of the bottom and top edges of p^+ bracket the
image of p^- in s2, some point of p^+ lands at the same s = -i rho_* as
psi^-, and Delta psi(-i rho_*) lies in the difference of the (x, y) parts.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import BolzanoFailure, ThresholdError
from .flow import FlowConfig, SectionHit, poincare_minus, poincare_plus
from .interval import ComplexInterval, Interval
from .problems import PROBLEMS, ProblemSpec, get_problem
from .state import StateBox

__all__ = ["ShootingConfig", "ShootingSets", "DeltaEnclosure", "build_shooting_sets", "enclose_delta"]

THREADS_ENV = "STOKES_THREADS"


@dataclass(frozen=True)
class ShootingConfig:
    s_minus: tuple[float, float] = (-1000.0, -16.00008679)
    s_plus_re: float = 1000.0
    rho_bar: float = 16.00008679
    half_width: float = 1e-6
    subdivide: int = 1

    def __post_init__(self):
        if not (self.s_minus[0] < 0.0 < self.s_plus_re):
            raise ValueError("need s_minus[0] < 0 < s_plus_re")
        if not self.half_width > 0.0:
            raise ValueError("half_width must be positive")
        if not self.rho_bar > 0.0:
            raise ValueError("rho_bar must be positive")
        if self.subdivide < 1:
            raise ValueError("subdivide must be >= 1")

    @classmethod
    def symmetric(cls, re_s: float = 1000.0, rho_bar: float = 16.00008679, half_width: float = 1e-6, subdivide: int = 1):
        """Start points at Re s = -re_s and +re_s, both at height -rho_bar."""
        return cls((-abs(re_s), -rho_bar), abs(re_s), rho_bar, half_width, subdivide)

    def to_json(self) -> dict:
        return {
            "s_minus": [repr(self.s_minus[0]), repr(self.s_minus[1])],
            "s_plus_re": repr(self.s_plus_re),
            "rho_bar": repr(self.rho_bar),
            "half_width": repr(self.half_width),
            "subdivide": self.subdivide,
        }


@dataclass(frozen=True)
class ShootingSets:
    pminus: StateBox
    pplus: StateBox
    pplus_l: StateBox
    pplus_u: StateBox
    xy_half_width: float


@dataclass(frozen=True)
class DeltaEnclosure:
    rho_star_enc: Interval
    delta_phi: ComplexInterval
    delta_varphi: ComplexInterval
    nonzero_certified: bool
    hits: dict
    comparisons: tuple[tuple[str, str, str], ...]

    def to_json(self) -> dict:
        return {
            "rho_star": {"label": "rho_* = -s2 of the P^- hit", "value": self.rho_star_enc.to_json()},
            "delta_phi": {"label": "Delta phi(-i rho_*)", "value": self.delta_phi.to_json()},
            "delta_varphi": {"label": "Delta varphi(-i rho_*)", "value": self.delta_varphi.to_json()},
            "nonzero_certified": self.nonzero_certified,
            "bolzano": [{"check": c, "left_hi": a, "right_lo": b} for c, a, b in self.comparisons],
            "hits": {k: v.to_json() for k, v in self.hits.items()},
        }


def build_shooting_sets(p: ProblemSpec, cfg: ShootingConfig, m0: Interval) -> ShootingSets:
    """The four start boxes; the (x, y) part is the cube of half-width M0 |s1|^-3."""
    re_minus, re_plus = abs(cfg.s_minus[0]), abs(cfg.s_plus_re)
    if not (cfg.rho_bar <= re_minus and cfg.rho_bar <= re_plus):
        raise ThresholdError(
            f"the bound M0 |Re s|^-3 needs rho <= |Re s|; got rho_bar = {cfg.rho_bar}, |Re s| = {re_minus}, {re_plus}",
            gate="shooting",
        )
    if m0.lo < 0.0:
        raise ThresholdError(f"M0 must be non-negative, got {m0}", gate="shooting")
    w_minus = (m0 / Interval(re_minus) ** 3).hi
    w_plus = (m0 / Interval(re_plus) ** 3).hi
    sym = Interval(-1.0, 1.0)
    xy_minus = [sym * w_minus] * 4
    xy_plus = [sym * w_plus] * 4
    s2_lo = Interval(-cfg.rho_bar) - Interval(cfg.half_width)
    s2_hi = Interval(-cfg.rho_bar) + Interval(cfg.half_width)
    # the edges must be exact floats: use the outer endpoints
    low_edge, high_edge = Interval(s2_lo.lo), Interval(s2_hi.hi)
    pminus = StateBox.from_components(xy_minus + [Interval(cfg.s_minus[0]), Interval(cfg.s_minus[1])])
    s1p = Interval(cfg.s_plus_re)
    pplus = StateBox.from_components(xy_plus + [s1p, Interval(low_edge.lo, high_edge.hi)])
    pplus_l = StateBox.from_components(xy_plus + [s1p, low_edge])
    pplus_u = StateBox.from_components(xy_plus + [s1p, high_edge])
    return ShootingSets(pminus, pplus, pplus_l, pplus_u, max(w_minus, w_plus))


def _transport(args) -> SectionHit:
    name, problem, box, direction, flow_cfg = args
    p = problem if problem is not None else get_problem(name)
    if direction == "forward":
        return poincare_minus(p, box, flow_cfg)
    return poincare_plus(p, box, flow_cfg)


def _split_s2(box: StateBox, n: int) -> list[StateBox]:
    if n == 1:
        return [box]
    lo, hi = box.s2.lo, box.s2.hi
    cuts = [lo] + [lo + (hi - lo) * k / n for k in range(1, n)] + [hi]
    return [box.with_(s2=Interval(cuts[k], cuts[k + 1])) for k in range(n)]


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_transports(p: ProblemSpec, jobs: list[tuple[StateBox, str]], flow_cfg: FlowConfig, workers: int = 1) -> list[SectionHit]:
    """Run independent transports, in worker processes when ``workers > 1``.

    Worker processes rebuild the problem by name, so parallelism is only
    used for the built-in problems.
    """
    builtin = p.name in PROBLEMS
    if workers > 1 and builtin and len(jobs) > 1:
        args = [(p.name, None, box, d, flow_cfg) for box, d in jobs]
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            return list(pool.map(_transport, args))
    return [_transport((p.name, p, box, d, flow_cfg)) for box, d in jobs]


def _hull_hits(hits: list[SectionHit]) -> SectionHit:
    out = hits[0]
    for h in hits[1:]:
        out = SectionHit(
            out.state.hull(h.state),
            out.time_enclosure.hull(h.time_enclosure),
            out.s1_rate.hull(h.s1_rate),
            out.steps + h.steps,
        )
    return out


def _strictly_below(a: Interval, b: Interval) -> bool:
    return a.hi < b.lo


def enclose_delta(
    p: ProblemSpec,
    cfg: ShootingConfig,
    m0: Interval,
    flow_cfg: FlowConfig = FlowConfig(),
    workers: Optional[int] = None,
    log: Optional[Callable[[str], None]] = None,
) -> DeltaEnclosure:
    """Transport the shooting sets and check the three Bolzano inequalities."""
    sets = build_shooting_sets(p, cfg, m0)
    workers = workers if workers is not None else thread_count()
    say = log or (lambda _msg: None)
    # the three edge transports decide the Bolzano check; p^+ itself only
    # matters once that check has passed
    edge_jobs = [(sets.pminus, "forward"), (sets.pplus_l, "backward"), (sets.pplus_u, "backward")]
    hit_minus, hit_l, hit_u = run_transports(p, edge_jobs, flow_cfg, workers)
    for name, h in (("P-(p-)", hit_minus), ("P+(p+_l)", hit_l), ("P+(p+_u)", hit_u)):
        say(f"{name}: s2 = {h.state.s2}, steps = {h.steps}, time = {h.time_enclosure}")

    s2_minus, s2_l, s2_u = hit_minus.state.s2, hit_l.state.s2, hit_u.state.s2
    checks = (
        ("P+(p+_l).s2 < P-(p-).s2", s2_l, s2_minus),
        ("P-(p-).s2 < P+(p+_u).s2", s2_minus, s2_u),
        ("P+(p+_u).s2 < 0", s2_u, Interval(0.0)),
    )
    comparisons = []
    for label, left, right in checks:
        comparisons.append((label, repr(left.hi), repr(right.lo)))
        if not _strictly_below(left, right):
            raise BolzanoFailure(
                f"Bolzano inequality {label} not verified: left = {left}, right = {right}", comparison=label
            )

    plus_jobs = [(box, "backward") for box in _split_s2(sets.pplus, cfg.subdivide)]
    hit_plus = _hull_hits(run_transports(p, plus_jobs, flow_cfg, workers))
    say(f"P+(p+): s2 = {hit_plus.state.s2}, steps = {hit_plus.steps}, time = {hit_plus.time_enclosure}")

    a, b = hit_plus.state, hit_minus.state
    delta_phi = ComplexInterval(a.x1 - b.x1, a.y1 - b.y1)
    delta_varphi = ComplexInterval(a.x2 - b.x2, a.y2 - b.y2)
    nonzero = not delta_phi.contains_zero() or not delta_varphi.contains_zero()
    hit_map = {"pminus": hit_minus, "pplus_l": hit_l, "pplus_u": hit_u, "pplus": hit_plus}
    return DeltaEnclosure(-s2_minus, delta_phi, delta_varphi, nonzero, hit_map, tuple(comparisons))
