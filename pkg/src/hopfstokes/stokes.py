"""Enclosures of the Stokes constant from a validated Delta phi.

* ``kappa0`` turns Delta phi(-i rho) into the proxy
  kappa0 = i exp(alpha (rho - i h0 log rho - h0 pi/2)) Delta phi / rho.
* ``theta_basic`` encloses Theta = kappa0 (1 + g) with |g| <= Mbar.
* ``theta_refined`` (h0 = 0 only) adds the first terms of the K11 series,
  Theta = kappa0 (1 - b1/(3 rho^3) + b2/(4 rho^4) - b3/(5 rho^5) - b4/(6 rho^6)) + ET.

Disc-shaped error terms are enclosed by the circumscribed rectangle.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from .constants import ConstantTable
from .errors import NotApplicable, ThresholdError
from .interval import (
    ComplexInterval,
    Interval,
    abs_upper,
    complex_exp,
    log,
    pi_enclosure,
    pow_int,
    sqrt,
)
from .problems import ProblemSpec, RefinementData

__all__ = [
    "kappa0",
    "theta_basic",
    "series_factor",
    "m_star",
    "RefinedTheta",
    "theta_refined",
    "laurent_mul",
    "psi_star_products",
    "IdentityReport",
    "check_psi_star_identities",
    "REFERENCE_PHI_VARPHI",
    "REFERENCE_K11_SERIES",
]


def kappa0(p: ProblemSpec, rho: Interval, delta_phi: ComplexInterval) -> ComplexInterval:
    """i exp(alpha (rho - i h0 log rho - h0 pi/2)) Delta phi(-i rho) / rho."""
    if not rho.lo > 0.0:
        raise ThresholdError(f"kappa0 needs rho > 0, got {rho}", gate="rho>0")
    alpha = Interval(p.ledger.alpha)
    h0 = Interval(p.ledger.h0)
    if p.ledger.h0 == 0.0:
        phase = ComplexInterval(alpha * rho, Interval(0.0))
    else:
        phase = ComplexInterval(alpha * (rho - h0 * pi_enclosure() / 2), -(alpha * h0 * log(rho)))
    factor = complex_exp(phase)
    i_delta = ComplexInterval(-delta_phi.im, delta_phi.re)
    return i_delta * factor / rho


def theta_basic(k0: ComplexInterval, mbar: Interval) -> ComplexInterval:
    """Rectangle containing kappa0 (1 + g) for every complex |g| <= Mbar."""
    if not mbar.hi < 1.0:
        raise ThresholdError(f"Mbar = {mbar} is not below 1", gate="Mbar<1")
    if mbar.lo < 0.0:
        raise ValueError("Mbar must be non-negative")
    radius = (Interval(mbar.hi) * abs_upper(k0)).hi
    return k0.inflate(radius)


def series_factor(beta, rho: Interval) -> Interval:
    """1 - b1/(3 rho^3) + b2/(4 rho^4) - b3/(5 rho^5) - b4/(6 rho^6)."""
    b1, b2, b3, b4 = (Interval(b) for b in beta)
    return (
        1
        - b1 / (3 * pow_int(rho, 3))
        + b2 / (4 * pow_int(rho, 4))
        - b3 / (5 * pow_int(rho, 5))
        - b4 / (6 * pow_int(rho, 6))
    )


def m_star(rho: Interval) -> Interval:
    """Bound |phi_*|, |varphi_*| <= M_*(rho) |s|^-3: 1 + 4/rho + 20/rho^2 + 120/rho^3."""
    return 1 + 4 / rho + 20 / rho.sqr() + 120 / pow_int(rho, 3)


# -- exact Laurent arithmetic in 1/s --------------------------------------
# A series is a dict {k: (re, im)} meaning sum (re + i im) s^-k, with integer
# (Gaussian integer) coefficients.


def laurent_mul(a: dict, b: dict) -> dict:
    out: dict = defaultdict(lambda: (0, 0))
    for i, (ar, ai) in a.items():
        for j, (br, bi) in b.items():
            cr, ci = out[i + j]
            out[i + j] = (cr + ar * br - ai * bi, ci + ar * bi + ai * br)
    return {k: v for k, v in sorted(out.items()) if v != (0, 0)}


def _laurent_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, (br, bi) in b.items():
        ar, ai = out.get(k, (0, 0))
        out[k] = (ar + br, ai + bi)
    return {k: v for k, v in sorted(out.items()) if v != (0, 0)}


def psi_star_products(data: RefinementData) -> tuple[dict, dict]:
    """Exact phi_* varphi_* and 2 varphi_* phi_* s^2 (i - 1/s) + varphi_*/s."""
    phi, vphi = data.psi_star
    prod = laurent_mul(phi, vphi)
    s2_factor = {-2: (0, 2), -1: (-2, 0)}  # 2 s^2 (i - 1/s) = 2i s^2 - 2 s
    vphi_over_s = {k + 1: v for k, v in vphi.items()}
    k11 = _laurent_add(laurent_mul(prod, s2_factor), vphi_over_s)
    return prod, k11


# Reference expansions the refined estimate is built on (leading terms only).
REFERENCE_PHI_VARPHI = {6: (1, 0), 8: (-24, 0), 10: (400, 0)}
REFERENCE_K11_SERIES = {4: (0, 3), 5: (-6, 0), 6: (0, -68), 7: (48, 0), 8: (0, 800), 9: (-800, 0)}


def _beta_series(beta) -> dict:
    b1, b2, b3, b4 = beta
    return {4: (0, b1), 5: (b2, 0), 6: (0, b3), 7: (b4, 0)}


@dataclass(frozen=True)
class IdentityReport:
    """Exact products of the psi_* coefficients versus the reference expansions."""

    phi_varphi: dict
    k11_series: dict
    phi_varphi_mismatch: dict  # power -> (exact, reference)
    k11_mismatch: dict
    beta_mismatch: dict

    @property
    def holds(self) -> bool:
        return not (self.phi_varphi_mismatch or self.k11_mismatch or self.beta_mismatch)

    def to_json(self) -> dict:
        def enc(d):
            return {str(k): [list(v[0]), list(v[1])] for k, v in d.items()}

        return {
            "phi_varphi_exact": {str(k): list(v) for k, v in self.phi_varphi.items()},
            "k11_series_exact": {str(k): list(v) for k, v in self.k11_series.items()},
            "phi_varphi_mismatch": enc(self.phi_varphi_mismatch),
            "k11_series_mismatch": enc(self.k11_mismatch),
            "beta_mismatch": enc(self.beta_mismatch),
            "holds": self.holds,
        }


def _diff(exact: dict, ref: dict) -> dict:
    keys = sorted(set(exact) | set(ref))
    return {k: (exact.get(k, (0, 0)), ref.get(k, (0, 0))) for k in keys if exact.get(k, (0, 0)) != ref.get(k, (0, 0))}


def check_psi_star_identities(data: RefinementData) -> IdentityReport:
    """Compare exact products with the reference identities, coefficient by coefficient.

    Every power present in either side is compared, so an identity only
    holds when the exact product equals the reference polynomial.
    """
    prod, k11 = psi_star_products(data)
    beta_exact = {k: v for k, v in k11.items() if 4 <= k <= 7}
    return IdentityReport(
        phi_varphi=prod,
        k11_series=k11,
        phi_varphi_mismatch=_diff(prod, REFERENCE_PHI_VARPHI),
        k11_mismatch=_diff(k11, REFERENCE_K11_SERIES),
        beta_mismatch=_diff(beta_exact, _beta_series(data.beta)),
    )


def series_tail_bound(data: RefinementData, rho: Interval) -> Interval:
    """Upper bound of int_rho^inf |P(ir) - beta series(ir)| dr with P the exact K11 polynomial.

    Term by term, int_rho^inf |c| r^-k dr = |c| / ((k - 1) rho^(k-1)).
    """
    _, k11 = psi_star_products(data)
    diff = _laurent_add(k11, {k: (-re, -im) for k, (re, im) in _beta_series(data.beta).items()})
    total = Interval(0.0)
    for k, (re, im) in diff.items():
        if k < 2:
            raise ValueError("K11 series must decay at least like s^-2")
        modulus = sqrt(Interval(re).sqr() + Interval(im).sqr())
        total = total + modulus / ((k - 1) * pow_int(rho, k - 1))
    return total


@dataclass(frozen=True)
class RefinedTheta:
    theta: ComplexInterval
    factor: Interval
    m_star: Interval
    b: Interval
    r: Interval
    b11: Interval
    b12: Interval
    b13: Interval
    b14: Interval
    series_tail: Interval
    es: Interval
    e_theta: Interval
    et: Interval

    LABELS = {
        "factor": "series factor 1 - b1/(3 rho^3) + b2/(4 rho^4) - b3/(5 rho^5) - b4/(6 rho^6)",
        "m_star": "M_*(rho) = 1 + 4/rho + 20/rho^2 + 120/rho^3",
        "b": "B = (5 pi/32)(M11_4 + M12_4) M0 + 225 pi/2, bound of |psi - psi_*| |s|^6",
        "r": "R = (1 + 4 M0 (1 + 1/rho) + 3 M0^2/rho^4) / (1 - M0^2/rho^4)^3",
        "b11": "B11, bound of the quadratic remainder of the K11 numerator",
        "b12": "B12, bound of the denominator expansion remainder",
        "b13": "B13, bound of the first-order denominator correction",
        "b14": "B14 = 800 (1 - 1/rho), reference bound of the K11 polynomial beyond s^-7",
        "series_tail": "exact tail int_rho^inf |K11 polynomial - beta series| dr",
        "es": "|ES| <= |kappa0| (B R/(6 rho^6) + (B11 + B12 + B13 + B14)/(7 rho^7) + tail)",
        "e_theta": "|E_Theta| <= A1 A |kappa0| / (1 - A)",
        "et": "|ET| <= |ES| + |E_Theta|",
    }

    def to_json(self) -> dict:
        out = {"theta": self.theta.to_json()}
        for key, label in self.LABELS.items():
            out[key] = {"label": label, "value": getattr(self, key).to_json()}
        return out


def theta_refined(p: ProblemSpec, table: ConstantTable, rho: Interval, k0: ComplexInterval) -> RefinedTheta:
    """Refined enclosure using the K11 series; needs refinement data and h0 = 0."""
    data = p.refinement_data
    if data is None or not data.applicable:
        raise NotApplicable(f"problem {p.name!r} has no refinement data")
    if p.ledger.h0 != 0.0:
        raise NotApplicable("the refined estimate is only available for h0 = 0")
    if not (table.rho.lo <= rho.lo and rho.hi <= table.rho.hi):
        raise ValueError("constant table was evaluated at a different rho")
    m0 = table.m0
    ms = m_star(rho)
    if not ms.hi <= m0.lo:
        raise ThresholdError(f"M_*(rho) = {ms} not certified <= M0 = {m0}", gate="M*<=M0")
    r4 = pow_int(rho, 4)
    q0 = m0.sqr() / r4
    qs = ms.sqr() / r4
    if not (q0.hi < 1.0 and qs.hi < 1.0):
        raise ThresholdError(f"M0^2/rho^4 = {q0} or M_*^2/rho^4 = {qs} not below 1", gate="M*<=M0")
    one_plus = 1 + 1 / rho
    pi = pi_enclosure()
    b = 5 * pi / 32 * (table.m11[3] + table.m12[2]) * m0 + 225 * pi / 2
    r = (1 + 4 * m0 * one_plus + 3 * q0) / pow_int(1 - q0, 3)
    b11 = pow_int(ms, 4) * one_plus / (1 - qs).sqr()
    b12 = pow_int(ms, 5) * (2 * ms * one_plus + 1) * (3 + 2 * qs) / (r4 * (1 - qs).sqr())
    b13 = 2 * pow_int(ms, 3) * (2 * ms * one_plus + 1)
    b14 = 800 * (1 - 1 / rho)
    # The exact polynomial tail is added on top of B14: it also absorbs any
    # difference between beta and the exact expansion of the K11 numerator.
    tail = series_tail_bound(data, rho)
    k_abs = Interval(abs_upper(k0))
    es = k_abs * (b * r / (6 * pow_int(rho, 6)) + (b11 + b12 + b13 + b14) / (7 * pow_int(rho, 7)) + tail)
    a = table.a
    if not a.hi < 1.0:
        raise ThresholdError(f"A = {a} is not below 1", gate="A<1")
    e_theta = table.a1 * a * k_abs / (1 - a)
    et = es + e_theta
    factor = series_factor(data.beta, rho)
    theta = (k0 * factor).inflate(et.hi)
    return RefinedTheta(theta, factor, ms, b, r, b11, b12, b13, b14, tail, es, e_theta, et)
