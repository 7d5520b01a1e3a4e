"""Outward-rounded real and complex interval arithmetic in binary64.

Directed rounding is emulated: every result is computed in round-to-nearest
and the exact rounding error is recovered with error-free transformations
(TwoSum, Dekker's TwoProduct).  An endpoint is moved one ulp outward only
when the operation was actually inexact, so exactly representable results
such as ``[1, 2] + [3, 4]`` stay exact.

Elementary functions wrap the C library and nudge the result two ulps
outward.  ``tests/test_interval.py`` checks this against mpmath on 10**5
random arguments.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import DomainError

__all__ = [
    "Interval",
    "ComplexInterval",
    "IntervalVector",
    "pi_enclosure",
    "exp",
    "log",
    "sqrt",
    "sin",
    "cos",
    "atan2",
    "pow_int",
    "complex_exp",
    "abs_upper",
]

_INF = math.inf
_SPLITTER = 134217729.0  # 2**27 + 1
_SPLIT_MAX = 2.0**995
_TINY = 2.0**-960

Number = Union[int, float, Fraction]


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float] | None:
    """Exact ``a*b = p + e``; None when splitting could overflow/underflow."""
    p = a * b
    if p == 0.0 or not math.isfinite(p):
        return None
    if abs(a) > _SPLIT_MAX or abs(b) > _SPLIT_MAX or abs(p) < _TINY:
        return None
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def add_down(a: float, b: float) -> float:
    s, e = _two_sum(a, b)
    if not math.isfinite(s):
        return s
    return s if e >= 0.0 else _down(s)


def add_up(a: float, b: float) -> float:
    s, e = _two_sum(a, b)
    if not math.isfinite(s):
        return s
    return s if e <= 0.0 else _up(s)


def mul_down(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    pe = _two_prod(a, b)
    if pe is None:
        return _down(a * b)
    p, e = pe
    return p if e >= 0.0 else _down(p)


def mul_up(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    pe = _two_prod(a, b)
    if pe is None:
        return _up(a * b)
    p, e = pe
    return p if e <= 0.0 else _up(p)


def _div_residual_sign(a: float, b: float, q: float) -> int | None:
    """Sign of ``a/b - q`` computed exactly, or None if undecidable."""
    pe = _two_prod(q, b)
    if pe is None:
        return None
    p, e = pe
    r = (a - p) - e  # a - p is exact by Sterbenz
    if r == 0.0:
        return 0
    return 1 if (r > 0.0) == (b > 0.0) else -1


def div_down(a: float, b: float) -> float:
    if a == 0.0:
        return 0.0
    q = a / b
    sgn = _div_residual_sign(a, b, q)
    if sgn is None:
        return _down(q)
    return _down(q) if sgn < 0 else q


def div_up(a: float, b: float) -> float:
    if a == 0.0:
        return 0.0
    q = a / b
    sgn = _div_residual_sign(a, b, q)
    if sgn is None:
        return _up(q)
    return _up(q) if sgn > 0 else q


def sqrt_down(a: float) -> float:
    s = math.sqrt(a)
    pe = _two_prod(s, s)
    if pe is None:
        return _down(s) if s > 0.0 else 0.0
    p, e = pe
    d = (p - a) + e
    return _down(s) if d > 0.0 else s


def sqrt_up(a: float) -> float:
    if a == 0.0:
        return 0.0
    s = math.sqrt(a)
    pe = _two_prod(s, s)
    if pe is None:
        return _up(s)
    p, e = pe
    d = (p - a) + e
    return _up(s) if d < 0.0 else s


def _float_enclosure(x: Number) -> tuple[float, float]:
    """Tightest binary64 pair bracketing an exact number."""
    if isinstance(x, float):
        return x, x
    f = float(x)
    if Fraction(f) == Fraction(x):
        return f, f
    if Fraction(f) < Fraction(x):
        return f, _up(f)
    return _down(f), f


class Interval:
    """Closed real interval ``[lo, hi]`` with finite binary64 endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Number, hi: Number | None = None):
        if hi is None:
            hi = lo
        lo_f = _float_enclosure(lo)[0]
        hi_f = _float_enclosure(hi)[1]
        if math.isnan(lo_f) or math.isnan(hi_f):
            raise DomainError("NaN endpoint")
        if lo_f > hi_f:
            raise DomainError(f"empty interval [{lo_f!r}, {hi_f!r}]")
        if not (math.isfinite(lo_f) and math.isfinite(hi_f)):
            raise DomainError(f"unbounded interval [{lo_f!r}, {hi_f!r}]")
        self.lo = lo_f
        self.hi = hi_f

    @classmethod
    def from_decimal(cls, text: str) -> "Interval":
        """Enclosure of a decimal literal such as ``"16.00008679"``."""
        return cls(Fraction(text), Fraction(text))

    @classmethod
    def hull_of(cls, values: Iterable["Interval | float"]) -> "Interval":
        items = [_as_interval(v) for v in values]
        return cls(min(v.lo for v in items), max(v.hi for v in items))

    # -- queries ---------------------------------------------------------
    def mid(self) -> float:
        if self.lo == -self.hi:
            return 0.0
        m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    def rad(self) -> float:
        """Upper bound on the radius around :meth:`mid`."""
        m = self.mid()
        return max(add_up(self.hi, -m), add_up(m, -self.lo))

    def width(self) -> float:
        return add_up(self.hi, -self.lo)

    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> float:
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x: "Number | Interval") -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def subset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def interior_subset(self, other: "Interval") -> bool:
        return other.lo < self.lo and self.hi < other.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other: "Interval | float") -> "Interval":
        o = _as_interval(other)
        return Interval(min(self.lo, o.lo), max(self.hi, o.hi))

    def certainly_lt(self, other: "Interval | float") -> bool:
        return self.hi < _as_interval(other).lo

    def certainly_le(self, other: "Interval | float") -> bool:
        return self.hi <= _as_interval(other).lo

    def certainly_positive(self) -> bool:
        return self.lo > 0.0

    def is_point(self) -> bool:
        return self.lo == self.hi

    # -- arithmetic ------------------------------------------------------
    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __add__(self, other) -> "Interval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return _checked(add_down(self.lo, o.lo), add_up(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return _checked(add_down(self.lo, -o.hi), add_up(self.hi, -o.lo))

    def __rsub__(self, other) -> "Interval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other) -> "Interval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        lo = min(mul_down(a, c), mul_down(a, d), mul_down(b, c), mul_down(b, d))
        hi = max(mul_up(a, c), mul_up(a, d), mul_up(b, c), mul_up(b, d))
        return _checked(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if o.lo <= 0.0 <= o.hi:
            raise DomainError(f"division by interval containing zero: {o}")
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        lo = min(div_down(a, c), div_down(a, d), div_down(b, c), div_down(b, d))
        hi = max(div_up(a, c), div_up(a, d), div_up(b, c), div_up(b, d))
        return _checked(lo, hi)

    def __rtruediv__(self, other) -> "Interval":
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, n: int) -> "Interval":
        return pow_int(self, n)

    def sqr(self) -> "Interval":
        return pow_int(self, 2)

    def __abs__(self) -> "Interval":
        return Interval(self.mig(), self.mag())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self) -> str:
        return f"[{self.lo:.12g}, {self.hi:.12g}]"

    def to_json(self) -> list[str]:
        # repr() of a float is the shortest string that round-trips exactly
        return [repr(self.lo), repr(self.hi)]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "Interval":
        return cls(float(data[0]), float(data[1]))


def _checked(lo: float, hi: float) -> Interval:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("overflow in interval arithmetic")
    out = Interval.__new__(Interval)
    out.lo = lo
    out.hi = hi
    return out


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, float, Fraction)) and not isinstance(x, bool):
        return Interval(x)
    return NotImplemented


def _as_interval(x) -> Interval:
    o = _coerce(x)
    if o is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as an interval")
    return o


# -- constants and elementary functions ---------------------------------

_PI = Interval(math.pi, _up(math.pi))  # math.pi < pi < nextafter(math.pi)


def pi_enclosure() -> Interval:
    """Validated enclosure of pi: the two doubles bracketing it."""
    return _PI


def _nudge_down(x: float, ulps: int = 2) -> float:
    for _ in range(ulps):
        x = _down(x)
    return x


def _nudge_up(x: float, ulps: int = 2) -> float:
    for _ in range(ulps):
        x = _up(x)
    return x


def exp(x: Interval) -> Interval:
    x = _as_interval(x)
    if x.hi > 709.0:
        raise DomainError("exp overflow")
    lo = 1.0 if x.lo == 0.0 else max(0.0, _nudge_down(math.exp(x.lo)))
    hi = 1.0 if x.hi == 0.0 else _nudge_up(math.exp(x.hi))
    return Interval(lo, hi)


def log(x: Interval) -> Interval:
    x = _as_interval(x)
    if x.lo <= 0.0:
        raise DomainError(f"log of non-positive interval {x}")
    lo = 0.0 if x.lo == 1.0 else _nudge_down(math.log(x.lo))
    hi = 0.0 if x.hi == 1.0 else _nudge_up(math.log(x.hi))
    return Interval(lo, hi)


def sqrt(x: Interval) -> Interval:
    x = _as_interval(x)
    if x.lo < 0.0:
        raise DomainError(f"sqrt of negative interval {x}")
    return Interval(sqrt_down(x.lo) if x.lo > 0.0 else 0.0, sqrt_up(x.hi))


def _extremum_indices(x: Interval, offset: Interval) -> range:
    """Integers k whose point k*pi + offset may lie in ``x`` (superset)."""
    k = (x - offset) / _PI
    return range(math.ceil(k.lo), math.floor(k.hi) + 1)


def cos(x: Interval) -> Interval:
    x = _as_interval(x)
    if x.width() >= 6.5:
        return Interval(-1.0, 1.0)
    a, b = math.cos(x.lo), math.cos(x.hi)
    lo = max(-1.0, _nudge_down(min(a, b)))
    hi = min(1.0, _nudge_up(max(a, b)))
    if x.lo == x.hi == 0.0:
        return Interval(1.0)
    for k in _extremum_indices(x, Interval(0.0)):
        if k % 2 == 0:
            hi = 1.0
        else:
            lo = -1.0
    return Interval(lo, hi)


def sin(x: Interval) -> Interval:
    x = _as_interval(x)
    if x.width() >= 6.5:
        return Interval(-1.0, 1.0)
    if x.lo == x.hi == 0.0:
        return Interval(0.0)
    a, b = math.sin(x.lo), math.sin(x.hi)
    lo = max(-1.0, _nudge_down(min(a, b)))
    hi = min(1.0, _nudge_up(max(a, b)))
    for k in _extremum_indices(x, _PI / 2):
        if k % 2 == 0:
            hi = 1.0
        else:
            lo = -1.0
    return Interval(lo, hi)


def atan2(y: Interval, x: Interval) -> Interval:
    """Enclosure of the principal argument of the rectangle ``x + iy``.

    The argument function has no critical points off the origin and is
    monotone along every edge of a rectangle that avoids the branch cut,
    so its extremes are attained at corners.
    """
    y, x = _as_interval(y), _as_interval(x)
    if x.lo <= 0.0 <= x.hi and y.lo <= 0.0 <= y.hi:
        raise DomainError("atan2 over a box containing the origin")
    if x.lo < 0.0 and y.lo < 0.0 <= y.hi:
        # the box meets the negative real axis from below
        return Interval(-_PI.hi, _PI.hi)
    ys = [0.0 if v == 0.0 else v for v in (y.lo, y.hi)]  # drop signed zeros
    vals = [math.atan2(yy, xx) for yy in ys for xx in (x.lo, x.hi)]
    lo = max(-_PI.hi, _nudge_down(min(vals)))
    hi = min(_PI.hi, _nudge_up(max(vals)))
    return Interval(lo, hi)


def pow_int(x: Interval, n: int) -> Interval:
    x = _as_interval(x)
    if n < 0:
        return 1 / pow_int(x, -n)
    if n == 0:
        return Interval(1.0)
    if n % 2 == 0:
        base_lo, base_hi = x.mig(), x.mag()
    else:
        base_lo, base_hi = x.lo, x.hi
    lo = _monotone_power(base_lo, n, down=True)
    hi = _monotone_power(base_hi, n, down=False)
    return _checked(lo, hi)


def _monotone_power(a: float, n: int, down: bool) -> float:
    """Directed-rounded a**n via an interval ladder (a may be negative, n odd)."""
    acc = Interval(1.0)
    base = Interval(a)
    k = n
    while k:
        if k & 1:
            acc = acc * base
        base = base * base
        k >>= 1
    return acc.lo if down else acc.hi


# -- complex rectangles -------------------------------------------------


class ComplexInterval:
    """Axis-aligned rectangle ``re + i*im`` in the complex plane."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0.0):
        self.re = _as_interval(re)
        self.im = _as_interval(im)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexInterval":
        return cls(Interval(z.real), Interval(z.imag))

    def __add__(self, other) -> "ComplexInterval":
        o = _as_complex(other)
        return ComplexInterval(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other) -> "ComplexInterval":
        o = _as_complex(other)
        return ComplexInterval(self.re - o.re, self.im - o.im)

    def __rsub__(self, other) -> "ComplexInterval":
        return _as_complex(other) - self

    def __neg__(self) -> "ComplexInterval":
        return ComplexInterval(-self.re, -self.im)

    def __mul__(self, other) -> "ComplexInterval":
        if isinstance(other, (Interval, int, float, Fraction)):
            o = _as_interval(other)
            return ComplexInterval(self.re * o, self.im * o)
        return complex_mul(self, _as_complex(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ComplexInterval":
        if isinstance(other, (Interval, int, float, Fraction)):
            o = _as_interval(other)
            return ComplexInterval(self.re / o, self.im / o)
        return complex_div(self, _as_complex(other))

    def __rtruediv__(self, other) -> "ComplexInterval":
        return complex_div(_as_complex(other), self)

    def conj(self) -> "ComplexInterval":
        return ComplexInterval(self.re, -self.im)

    def contains_zero(self) -> bool:
        return 0.0 in self.re and 0.0 in self.im

    def contains(self, z) -> bool:
        if isinstance(z, ComplexInterval):
            return self.re.contains(z.re) and self.im.contains(z.im)
        z = complex(z)
        return z.real in self.re and z.imag in self.im

    __contains__ = contains

    def intersects(self, other: "ComplexInterval") -> bool:
        return self.re.intersects(other.re) and self.im.intersects(other.im)

    def hull(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(self.re.hull(other.re), self.im.hull(other.im))

    def inflate(self, r: float) -> "ComplexInterval":
        """Rectangle circumscribing the Minkowski sum with the disc of radius r."""
        d = Interval(-r, r)
        return ComplexInterval(self.re + d, self.im + d)

    def mid(self) -> complex:
        return complex(self.re.mid(), self.im.mid())

    def __repr__(self) -> str:
        return f"ComplexInterval({self.re!r}, {self.im!r})"

    def __str__(self) -> str:
        return f"{self.re} + {self.im}i"

    def to_json(self) -> dict:
        return {"re": self.re.to_json(), "im": self.im.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "ComplexInterval":
        return cls(Interval.from_json(data["re"]), Interval.from_json(data["im"]))


def _as_complex(x) -> ComplexInterval:
    if isinstance(x, ComplexInterval):
        return x
    if isinstance(x, complex):
        return ComplexInterval.from_complex(x)
    return ComplexInterval(_as_interval(x), Interval(0.0))


def complex_mul(a: ComplexInterval, b: ComplexInterval) -> ComplexInterval:
    return ComplexInterval(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)


def complex_div(a: ComplexInterval, b: ComplexInterval) -> ComplexInterval:
    den = b.re.sqr() + b.im.sqr()
    if den.lo <= 0.0:
        raise DomainError(f"complex division by a rectangle containing zero: {b}")
    num = complex_mul(a, b.conj())
    return ComplexInterval(num.re / den, num.im / den)


def complex_exp(z: ComplexInterval) -> ComplexInterval:
    z = _as_complex(z)
    r = exp(z.re)
    return ComplexInterval(r * cos(z.im), r * sin(z.im))


def abs_upper(z: ComplexInterval) -> float:
    """Rigorous upper bound of |z| over the rectangle."""
    z = _as_complex(z)
    return sqrt(Interval(z.re.mag()).sqr() + Interval(z.im.mag()).sqr()).hi


def abs_lower(z: ComplexInterval) -> float:
    """Rigorous lower bound of |z| over the rectangle."""
    z = _as_complex(z)
    return sqrt(Interval(z.re.mig()).sqr() + Interval(z.im.mig()).sqr()).lo


# -- vectors ------------------------------------------------------------


class IntervalVector(Sequence[Interval]):
    """Fixed-dimension tuple of intervals."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Interval | float]):
        comps = tuple(_as_interval(c) for c in components)
        if not comps:
            raise ValueError("IntervalVector needs at least one component")
        self.components = comps

    @property
    def dimension(self) -> int:
        return len(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.components)

    def subset(self, other: "IntervalVector") -> bool:
        return len(self) == len(other) and all(a.subset(b) for a, b in zip(self, other))

    def intersects(self, other: "IntervalVector") -> bool:
        return all(a.intersects(b) for a, b in zip(self, other))

    def hull(self, other: "IntervalVector") -> "IntervalVector":
        return IntervalVector(a.hull(b) for a, b in zip(self, other))

    def contains_point(self, point: Sequence[float]) -> bool:
        return all(p in c for c, p in zip(self.components, point))

    def mid(self) -> list[float]:
        return [c.mid() for c in self.components]

    def max_width(self) -> float:
        return max(c.width() for c in self.components)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalVector) and self.components == other.components

    def __repr__(self) -> str:
        return f"IntervalVector({list(self.components)!r})"

    def to_json(self) -> list:
        return [c.to_json() for c in self.components]
