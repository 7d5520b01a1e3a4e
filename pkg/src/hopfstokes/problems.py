"""Inner-equation problem instances.

A problem bundles three things: the real six-dimensional vector field that
the validated integrator transports, the constant ledger (alpha, b, a3, h0
and the C-constants bounding the nonlinearity), and optional per-problem
sharpened bounds for the fourth-order derivative constants.

The field has two equivalent encodings.  ``real_rhs`` is the explicit real
formula in ``(x1, y1, x2, y2, s1, s2)``; it is written against plain
arithmetic so the same code runs on floats (oracle mode) and on
:class:`~hopfstokes.interval.Interval` (rigorous point evaluation).
``complex_rhs`` is the holomorphic form in ``(phi, varphi, s)`` used by the
Taylor engine; its realification is ``real_rhs``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import DomainError
from .interval import Interval, IntervalVector, pow_int
from .state import StateBox

__all__ = [
    "LedgerInputs",
    "VectorFieldSpec",
    "M4Override",
    "RefinementData",
    "ProblemSpec",
    "example1",
    "example2",
    "get_problem",
    "eval_field",
    "PROBLEMS",
]


# -- constant ledger -----------------------------------------------------


@dataclass(frozen=True)
class LedgerInputs:
    """Constants bounding the nonlinearity of one inner equation.

    ``a3`` and ``h0`` are the cubic coefficients of F1 and H at the origin;
    the ``c*`` fields are the (author-asserted) bounds on the remainders and
    derivatives of F and H.
    """

    alpha: float
    b: float
    a3: complex
    h0: float = 0.0
    cF0: float = 0.0
    cH0: float = 0.0
    cH0bar: float = 0.0
    cF: float = 0.0
    cFphi: float = 0.0
    cFvarphi: float = 0.0
    cH: float = 0.0
    cHphi: float = 0.0
    cHvarphi: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        for name in ("cF0", "cH0", "cH0bar", "cF", "cFphi", "cFvarphi", "cH", "cHphi", "cHvarphi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def cHbar(self) -> float:
        return self.cHphi + self.cHvarphi

    @property
    def cFbar(self) -> float:
        return self.cFphi + self.cFvarphi

    def abs_a3(self) -> Interval:
        """Enclosure of |a3|."""
        from .interval import sqrt

        re, im = Interval(self.a3.real), Interval(self.a3.imag)
        return sqrt(re.sqr() + im.sqr())

    def to_json(self) -> dict:
        out = {k: repr(getattr(self, k)) for k in self.__dataclass_fields__ if k != "a3"}
        out["a3"] = [repr(self.a3.real), repr(self.a3.imag)]
        return out


# -- vector field --------------------------------------------------------


def _sq(x):
    return x.sqr() if isinstance(x, Interval) else x * x


def _generic_real_rhs(state: Sequence, alpha, b, quadratic: bool) -> tuple:
    """Real field of the inner system; works on floats or Intervals.

    ``quadratic`` adds the (i/s)(phi^2 - varphi^2) forcing of the second
    example to both phi and varphi equations.
    """
    x1, y1, x2, y2, s1, s2 = state
    s1s, s2s = _sq(s1), _sq(s2)
    r2 = s1s + s2s
    if isinstance(r2, Interval):
        if r2.lo <= 0.0:
            raise DomainError("state box touches s = 0")
    elif r2 == 0.0:
        raise DomainError("state at s = 0")
    inv = 1 / r2
    r6 = r2 * r2 * r2
    forcing_re = s1 * (s1s - 3 * s2s) / r6
    forcing_im = s2 * (s2s - 3 * s1s) / r6
    rot_p = alpha + s2 * inv
    rot_m = alpha - s2 * inv
    c = s1 * inv
    dx1 = rot_p * y1 + c * x1 - forcing_re
    dy1 = -rot_p * x1 + c * y1 - forcing_im
    dx2 = -rot_m * y2 + c * x2 - forcing_re
    dy2 = rot_m * x2 + c * y2 - forcing_im
    if quadratic:
        p = _sq(x1) - _sq(y1) - _sq(x2) + _sq(y2)
        q = x1 * y1 - x2 * y2
        q_re = (s2 * p - 2 * s1 * q) * inv
        q_im = (s1 * p + 2 * s2 * q) * inv
        dx1, dy1 = dx1 + q_re, dy1 + q_im
        dx2, dy2 = dx2 + q_re, dy2 + q_im
    u = x1 * x2 - y1 * y2
    v = x1 * y2 + x2 * y1
    d = s1s - s2s
    two_s1s2 = 2 * s1 * s2
    ds1 = 1 - b * two_s1s2 * v + b * d * u
    ds2 = b * two_s1s2 * u + b * d * v
    return dx1, dy1, dx2, dy2, ds1, ds2


def _generic_complex_rhs(phi, vphi, s, alpha: float, b: float, quadratic: bool):
    """Holomorphic form: phi' = (-i alpha + 1/s) phi + F, varphi' = (i alpha + 1/s) varphi + F,
    s' = 1 + b s^2 phi varphi, with F = -1/s^3 (+ (i/s)(phi^2 - varphi^2))."""
    inv = s.recip()
    forcing = -(inv * inv * inv)
    if quadratic:
        forcing = forcing + (inv * (phi * phi - vphi * vphi)) * 1j
    dphi = phi * (inv + (-1j * alpha)) + forcing
    dvphi = vphi * (inv + 1j * alpha) + forcing
    ds = ((s * s) * (phi * vphi)) * b + 1.0
    return dphi, dvphi, ds


@dataclass(frozen=True)
class VectorFieldSpec:
    """Built-in evaluator for the real six-dimensional system."""

    real_rhs: Callable[[Sequence], tuple]
    complex_rhs: Callable
    taylor_order_support: int = 64
    description: str = ""

    def evaluate(self, box: StateBox) -> IntervalVector:
        return IntervalVector(self.real_rhs(box.components()))

    def evaluate_float(self, point: Sequence[float]) -> tuple[float, ...]:
        return tuple(float(v) for v in self.real_rhs([float(x) for x in point]))


def make_field(alpha: float, b: float, quadratic: bool, description: str = "") -> VectorFieldSpec:
    def real_rhs(state):
        return _generic_real_rhs(state, alpha, b, quadratic)

    def complex_rhs(phi, vphi, s):
        return _generic_complex_rhs(phi, vphi, s, alpha, b, quadratic)

    return VectorFieldSpec(real_rhs=real_rhs, complex_rhs=complex_rhs, description=description)


# -- sharpened bounds and refinement data --------------------------------


@dataclass(frozen=True)
class M4Override:
    """Author-supplied replacement for the fourth-order derivative constants.

    ``func(rho, m0)`` returns validated upper bounds ``(M11_4, M12_4)``.
    When ``zero_lower_orders`` is set the first- to third-order constants are
    replaced by zero as well (the direct derivative computation shows they
    vanish).
    """

    func: Callable[[Interval, Interval], tuple[Interval, Interval]]
    zero_lower_orders: bool
    justification: str


@dataclass(frozen=True)
class RefinementData:
    """Series data for the refined Stokes estimate (h0 = 0 only).

    ``psi_star`` holds the Laurent coefficients of the approximate solution:
    ``psi_star[0][k]`` is the coefficient of ``s**-k`` in phi_*, and
    ``psi_star[1][k]`` the same for varphi_*.  Coefficients are Gaussian
    integers stored as ``(re, im)`` integer pairs.  ``beta`` are the four
    real coefficients of K11 = i b1/s^4 + b2/s^5 + i b3/s^6 + b4/s^7 + ...
    """

    beta: tuple[int, int, int, int]
    psi_star: tuple[dict[int, tuple[int, int]], dict[int, tuple[int, int]]]
    applicable: bool = True


# -- problem spec --------------------------------------------------------


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    ledger: LedgerInputs
    field: VectorFieldSpec
    m4_override: Optional[M4Override] = None
    refinement_data: Optional[RefinementData] = None
    notes: tuple[str, ...] = ()


def eval_field(p: ProblemSpec, box: StateBox) -> IntervalVector:
    """Containment-sound enclosure of the field over ``box``."""
    return p.field.evaluate(box)


def _example2_m4(rho: Interval, m0: Interval) -> tuple[Interval, Interval]:
    q = m0.sqr() / pow_int(rho, 4)
    den = (1 - q).sqr()
    one_plus = 1 + 1 / rho
    m11 = m0 / den * (3 + m0 * one_plus * (2 - q))
    m12 = m0 / den * (3 + m0 * one_plus)
    return m11, m12


_PSI_STAR_EX1 = (
    {3: (0, -1), 4: (-4, 0), 5: (0, 20), 6: (120, 0)},
    {3: (0, 1), 4: (-4, 0), 5: (0, -20), 6: (120, 0)},
)


def example1() -> ProblemSpec:
    """alpha = b = 1, F1 = F2 = -s^-3, H = 0 (reversible example)."""
    ledger = LedgerInputs(alpha=1.0, b=1.0, a3=1 + 0j, h0=0.0, cF=1.0)
    return ProblemSpec(
        name="example1",
        ledger=ledger,
        field=make_field(1.0, 1.0, quadratic=False, description="F = -1/s^3"),
        refinement_data=RefinementData(beta=(3, -6, -68, 48), psi_star=_PSI_STAR_EX1),
        notes=(
            "C_F = 1 is the bound |F| <= |z|^3 for F = z^3; it is what makes the "
            "generic M11_4, M12_4 reduce to the closed forms used for this example.",
        ),
    )


def example2() -> ProblemSpec:
    """alpha = b = 1, F = -s^-3 + (i/s)(phi^2 - varphi^2), H = 0 (non-reversible)."""
    ledger = LedgerInputs(alpha=1.0, b=1.0, a3=1 + 0j, h0=0.0, cF=2.0, cFphi=1.0, cFvarphi=1.0)
    override = M4Override(
        func=_example2_m4,
        zero_lower_orders=True,
        justification=(
            "Direct differentiation of S for this field: the lower-order "
            "derivative constants vanish and M11_4, M12_4 take the closed forms "
            "with leading constant 3."
        ),
    )
    return ProblemSpec(
        name="example2",
        ledger=ledger,
        field=make_field(1.0, 1.0, quadratic=True, description="F = -1/s^3 + (i/s)(phi^2 - varphi^2)"),
        m4_override=override,
    )


PROBLEMS: dict[str, Callable[[], ProblemSpec]] = {"example1": example1, "example2": example2}


def get_problem(name: str) -> ProblemSpec:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
