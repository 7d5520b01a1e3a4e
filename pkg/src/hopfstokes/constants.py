"""Validated rho-dependent constants of the fixed-point argument.

Every function returns an :class:`Interval` whose upper endpoint is a
rigorous bound for the corresponding constant.  Gate conditions are decided
on interval endpoints only; a comparison that the enclosure cannot settle is
treated as a failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, ThresholdError
from .interval import Interval, pi_enclosure, pow_int, sqrt
from .problems import ProblemSpec

__all__ = [
    "ConstantTable",
    "b_constant",
    "c_constant",
    "c0_bound",
    "m0_bound",
    "m_matrix",
    "lipschitz",
    "contraction_a",
    "relative_error",
    "constant_table",
    "interval_max",
    "interval_min",
]

ZERO = Interval(0.0)


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@lru_cache(maxsize=None)
def b_constant(m: int) -> Interval:
    """B_m = int_0^inf (t^2 + 1)^(-m/2) dt in closed form via double factorials."""
    if m < 3:
        raise DomainError(f"B_m needs m >= 3, got {m}")
    ratio = Interval(Fraction(_double_factorial(m - 3), _double_factorial(m - 2)))
    if m % 2 == 0:
        return pi_enclosure() / 2 * ratio
    return ratio


def c_constant(nu: int, alpha: Interval | float) -> Interval:
    """C_nu = (nu+2)^((nu+2)/2) / (alpha (nu+1)^((nu+1)/2)), valid for nu >= 4."""
    if nu < 4:
        raise DomainError(f"C_nu is only justified for nu >= 4, got {nu}")
    squared = Fraction((nu + 2) ** (nu + 2), (nu + 1) ** (nu + 1))
    return sqrt(Interval(squared)) / alpha


def _rho_checked(p: ProblemSpec, rho: Interval) -> Interval:
    floor = max(2.0, p.ledger.cH0bar)
    if not rho.lo > floor:
        raise ThresholdError(f"rho = {rho} must exceed max(2, C_H0bar) = {floor}", gate="rho1")
    return rho


def c0_bound(p: ProblemSpec, rho: Interval) -> Interval:
    """First-iteration remainder constant (C_F0 + |a3| C_H0bar) / (1 - C_H0bar / rho)."""
    rho = _rho_checked(p, _as_rho(rho))
    led = p.ledger
    num = Interval(led.cF0) + led.abs_a3() * led.cH0bar
    return num / (1 - Interval(led.cH0bar) / rho)


def m0_bound(p: ProblemSpec, rho: Interval) -> Interval:
    """M0 = 22 |a3| / (3 alpha) + 2 B5 C0."""
    led = p.ledger
    c0 = c0_bound(p, rho)
    return Interval(22) * led.abs_a3() / (3 * Interval(led.alpha)) + 2 * b_constant(5) * c0


@dataclass(frozen=True)
class MMatrix:
    m11: tuple[Interval, Interval, Interval, Interval]
    m12: tuple[Interval, Interval, Interval]


def _min_m0_factors(p: ProblemSpec, rho: Interval, m0: Interval) -> tuple[Interval, Interval]:
    led = p.ledger
    d = 1 - led.b * m0.sqr() / pow_int(rho, 4) - Interval(led.cH) / rho
    e = 1 - m0 / rho.sqr()
    return d, e


def m_matrix(p: ProblemSpec, rho: Interval) -> MMatrix:
    """Derivative constants M11^1..4 and M12^2..4."""
    rho = _as_rho(rho)
    led = p.ledger
    m0 = m0_bound(p, rho)
    d, e = _min_m0_factors(p, rho, m0)
    if not (d.lo > 0.0 and e.lo > 0.0):
        raise ThresholdError(
            f"minimum condition on M0 not verified at rho = {rho}: "
            f"1 - bM0^2/rho^4 - C_H/rho = {d}, 1 - M0/rho^2 = {e}",
            gate="minM0",
        )
    alpha = Interval(led.alpha)
    b = Interval(led.b)
    h0 = abs(Interval(led.h0))
    d2 = d.sqr()
    bm0_rho = b * m0 / rho

    m11_1 = alpha * h0 / d
    m11_2 = (h0 + alpha * led.cH0 + led.cFphi) / d
    m11_3 = (m0 * alpha * led.cHphi + led.cF * Interval(led.cHphi) + (alpha * led.cHbar * m0 + led.cH0) * d) / d2
    m11_4 = m0 / d2 * (b * (led.cF + alpha * m0) + led.cHphi + (alpha * b * m0 + led.cHbar + bm0_rho) * d + bm0_rho)
    m12_2 = Interval(led.cFvarphi) / d
    m12_3 = (m0 * alpha * led.cHvarphi + led.cF * Interval(led.cHvarphi)) / d2
    m12_4 = m0 / d2 * (b * (led.cF + alpha * m0) + led.cHvarphi + bm0_rho)

    ov = p.m4_override
    if ov is not None:
        m11_4, m12_4 = ov.func(rho, m0)
        if ov.zero_lower_orders:
            m11_1 = m11_2 = m11_3 = m12_2 = m12_3 = ZERO
    return MMatrix(m11=(m11_1, m11_2, m11_3, m11_4), m12=(m12_2, m12_3, m12_4))


def interval_max(a: Interval, b: Interval) -> Interval:
    return Interval(max(a.lo, b.lo), max(a.hi, b.hi))


def interval_min(a: Interval, b: Interval) -> Interval:
    return Interval(min(a.lo, b.lo), min(a.hi, b.hi))


def lipschitz(p: ProblemSpec, rho: Interval, mm: MMatrix | None = None) -> tuple[Interval, Interval, Interval]:
    """(L1, L2, L = min(L1, L2))."""
    rho = _as_rho(rho)
    mm = mm or m_matrix(p, rho)
    alpha = Interval(p.ledger.alpha)
    (m11_1, m11_2, m11_3, m11_4), (m12_2, m12_3, m12_4) = mm.m11, mm.m12
    s2, s3, s4 = m11_2 + m12_2, m11_3 + m12_3, m11_4 + m12_4
    c4_term = c_constant(4, alpha) * m11_1 / rho
    l1 = c4_term + b_constant(6) * s2 / rho + b_constant(7) * s3 / rho.sqr() + b_constant(8) * s4 / pow_int(rho, 3)
    l2 = (
        c4_term
        + c_constant(5, alpha) * s2 / rho.sqr()
        + c_constant(6, alpha) * s3 / pow_int(rho, 3)
        + c_constant(7, alpha) * s4 / pow_int(rho, 4)
    )
    return l1, l2, interval_min(l1, l2)


def contraction_a(p: ProblemSpec, rho: Interval, mm: MMatrix | None = None) -> tuple[Interval, Interval, Interval]:
    """(A1, A2, A = max(A1, A2))."""
    rho = _as_rho(rho)
    mm = mm or m_matrix(p, rho)
    alpha = Interval(p.ledger.alpha)
    (_, m11_2, m11_3, m11_4), (m12_2, m12_3, m12_4) = mm.m11, mm.m12
    r2, r3, r4, r5 = rho.sqr(), pow_int(rho, 3), pow_int(rho, 4), pow_int(rho, 5)
    a1 = m11_2 / rho + (m11_3 + m12_2) / (2 * r2) + (m11_4 + m12_3) / (3 * r3) + m12_4 / (4 * r4)
    two_alpha = 2 * alpha
    a2 = (
        m12_2 / (two_alpha * r2)
        + (m11_2 + m12_3) / (two_alpha * r3)
        + (m11_3 + m12_4) / (two_alpha * r4)
        + m11_4 / (two_alpha * r5)
    )
    return a1, a2, interval_max(a1, a2)


def relative_error(a1: Interval, a: Interval) -> Interval:
    """Mbar = A1 / (1 - A); needs A < 1."""
    if not a.hi < 1.0:
        raise ThresholdError(f"A = {a} is not certified below 1", gate="A<1")
    return a1 / (1 - a)


@dataclass(frozen=True)
class ConstantTable:
    """All rho-dependent bounds at one rho."""

    rho: Interval
    c0: Interval
    m0: Interval
    m11: tuple[Interval, Interval, Interval, Interval]
    m12: tuple[Interval, Interval, Interval]
    l1: Interval
    l2: Interval
    l: Interval
    a1: Interval
    a2: Interval
    a: Interval
    mbar: Interval

    LABELS = {
        "rho": "rho",
        "c0": "C0(rho), first-iteration remainder constant",
        "m0": "M0(rho) = 22|a3|/(3 alpha) + 2 B5 C0",
        "m11": "M11^j(rho), j = 1..4, derivative bounds (diagonal)",
        "m12": "M12^j(rho), j = 2..4, derivative bounds (off-diagonal)",
        "l1": "L1(rho), Lipschitz bound via B_m",
        "l2": "L2(rho), Lipschitz bound via C_nu",
        "l": "L(rho) = min(L1, L2)",
        "a1": "A1(rho), bound of the first component of G",
        "a2": "A2(rho), bound of the second component of G",
        "a": "A(rho) = max(A1, A2)",
        "mbar": "Mbar(rho) = A1 / (1 - A), relative error of kappa0",
    }

    def to_json(self) -> dict:
        out = {}
        for key, label in self.LABELS.items():
            val = getattr(self, key)
            if isinstance(val, tuple):
                out[key] = {"label": label, "value": [v.to_json() for v in val]}
            else:
                out[key] = {"label": label, "value": val.to_json()}
        return out


def constant_table(p: ProblemSpec, rho: Interval) -> ConstantTable:
    """Evaluate every constant at ``rho`` without judging the L and A gates."""
    rho = _as_rho(rho)
    c0 = c0_bound(p, rho)
    m0 = m0_bound(p, rho)
    mm = m_matrix(p, rho)
    l1, l2, l = lipschitz(p, rho, mm)
    a1, a2, a = contraction_a(p, rho, mm)
    mbar = relative_error(a1, a)
    return ConstantTable(rho, c0, m0, mm.m11, mm.m12, l1, l2, l, a1, a2, a, mbar)


def _as_rho(rho) -> Interval:
    return rho if isinstance(rho, Interval) else Interval(rho)
