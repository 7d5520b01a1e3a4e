"""Interval kernel: containment against mpmath, monotonicity, width control."""

from __future__ import annotations

import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfstokes.errors import DomainError
from hopfstokes.interval import (
    ComplexInterval,
    Interval,
    abs_upper,
    atan2,
    complex_exp,
    cos,
    exp,
    log,
    pi_enclosure,
    pow_int,
    sin,
    sqrt,
)

mpmath.mp.prec = 200
N_CASES = 100_000


def _encloses(iv: Interval, exact) -> bool:
    return mpmath.mpf(iv.lo) <= exact <= mpmath.mpf(iv.hi)


# -- spec examples ---------------------------------------------------------


def test_exact_addition_stays_exact():
    r = Interval(1, 2) + Interval(3, 4)
    assert (r.lo, r.hi) == (4.0, 6.0)


def test_symmetric_product():
    r = Interval(-1, 1) * Interval(-1, 1)
    assert (r.lo, r.hi) == (-1.0, 1.0)


def test_one_third_within_two_ulp():
    r = Interval(1.0) / Interval(3.0)
    assert _encloses(r, mpmath.mpf(1) / 3)
    assert r.hi - r.lo <= 2 * math.ulp(1 / 3)


def test_exp_zero_and_log_one():
    e0 = exp(Interval(0.0))
    assert e0.contains(1.0) and e0.hi - e0.lo <= 2 * math.ulp(1.0)
    assert log(Interval(1.0)).contains(0.0)


def test_exp_sixteen():
    r = exp(Interval(16.0))
    assert _encloses(r, mpmath.exp(16))
    assert r.contains(8886110.520507872)


def test_pi_enclosure_brackets_pi():
    p = pi_enclosure()
    assert p.lo == 3.141592653589793
    assert p.hi == math.nextafter(math.pi, math.inf)
    assert _encloses(p, mpmath.pi)
    assert abs(p.mid() - 3.141592653589793) < 1e-16
    assert _encloses(p / 2, mpmath.pi / 2)


def test_complex_examples():
    i = ComplexInterval(0.0, 1.0)
    assert (i * i).contains(-1 + 0j)
    assert complex_exp(ComplexInterval(0.0, 0.0)).contains(1 + 0j)
    a = abs_upper(ComplexInterval(3.0, 4.0))
    assert 5.0 <= a <= 5.0 + 4 * math.ulp(5.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        Interval(2.0, 1.0)
    with pytest.raises(DomainError):
        log(Interval(-1.0, 1.0))
    with pytest.raises(DomainError):
        sqrt(Interval(-1.0, -0.5))
    with pytest.raises(DomainError):
        Interval(1.0) / Interval(-1.0, 1.0)
    with pytest.raises(DomainError):
        atan2(Interval(-1.0, 1.0), Interval(-1.0, 1.0))


def test_json_round_trip():
    iv = Interval(1.0) / Interval(3.0)
    back = Interval.from_json(json.loads(json.dumps(iv.to_json())))
    assert (back.lo, back.hi) == (iv.lo, iv.hi)
    z = ComplexInterval(iv, -iv)
    zb = ComplexInterval.from_json(json.loads(json.dumps(z.to_json())))
    assert (zb.re.lo, zb.re.hi, zb.im.lo, zb.im.hi) == (z.re.lo, z.re.hi, z.im.lo, z.im.hi)


def test_decimal_literal_enclosure():
    r = Interval.from_decimal("16.00008679")
    assert _encloses(r, mpmath.mpf("16.00008679"))
    assert r.hi - r.lo <= math.ulp(16.0)


# -- randomized containment against mpmath ----------------------------------


def _random_floats(rng, n, lo_exp=-8, hi_exp=8, signed=True):
    mags = 10.0 ** rng.uniform(lo_exp, hi_exp, n)
    if signed:
        mags *= rng.choice([-1.0, 1.0], n)
    return mags


def _cases(rng):
    """(name, interval op, mpmath op, args) for N_CASES random point inputs."""
    per = -(-N_CASES // 11)
    a, b = _random_floats(rng, per), _random_floats(rng, per)
    pos = _random_floats(rng, per, signed=False)
    ex = rng.uniform(-700.0, 700.0, per)
    trig = rng.uniform(-1e6, 1e6, per) * 10.0 ** rng.uniform(-6, 0, per)
    ints = rng.integers(-7, 8, per)
    yield "add", lambda x, y: Interval(x) + Interval(y), lambda x, y: mpmath.mpf(x) + mpmath.mpf(y), zip(a, b)
    yield "sub", lambda x, y: Interval(x) - Interval(y), lambda x, y: mpmath.mpf(x) - mpmath.mpf(y), zip(a, b)
    yield "mul", lambda x, y: Interval(x) * Interval(y), lambda x, y: mpmath.mpf(x) * mpmath.mpf(y), zip(a, b)
    yield "div", lambda x, y: Interval(x) / Interval(y), lambda x, y: mpmath.mpf(x) / mpmath.mpf(y), zip(a, b)
    yield "sqrt", lambda x: sqrt(Interval(x)), lambda x: mpmath.sqrt(mpmath.mpf(x)), zip(pos)
    yield "exp", lambda x: exp(Interval(x)), lambda x: mpmath.exp(mpmath.mpf(x)), zip(ex)
    yield "log", lambda x: log(Interval(x)), lambda x: mpmath.log(mpmath.mpf(x)), zip(pos)
    yield "sin", lambda x: sin(Interval(x)), lambda x: mpmath.sin(mpmath.mpf(x)), zip(trig)
    yield "cos", lambda x: cos(Interval(x)), lambda x: mpmath.cos(mpmath.mpf(x)), zip(trig)
    yield "atan2", lambda y, x: atan2(Interval(y), Interval(x)), lambda y, x: mpmath.atan2(mpmath.mpf(y), mpmath.mpf(x)), zip(a, b)
    yield (
        "pow_int",
        lambda x, n: pow_int(Interval(x), int(n)),
        lambda x, n: mpmath.mpf(x) ** int(n),
        zip(rng.uniform(-30.0, 30.0, per), ints),
    )


def test_randomized_containment_1e5():
    rng = np.random.default_rng(20240611)
    violations = []
    count = 0
    for name, op, ref, args in _cases(rng):
        for arg in args:
            arg = tuple(float(v) if not isinstance(v, (np.integer,)) else int(v) for v in arg)
            if name == "pow_int" and arg[0] == 0.0 and arg[1] < 0:
                continue
            count += 1
            if not _encloses(op(*arg), ref(*arg)):
                violations.append((name, arg))
    assert count >= N_CASES
    assert violations == []


# -- width control ------------------------------------------------------------


@pytest.mark.parametrize(
    "fn, lo, hi",
    [(exp, -50.0, 50.0), (log, 1e-6, 1e6), (sqrt, 1e-6, 1e6), (sin, -100.0, 100.0), (cos, -100.0, 100.0)],
)
def test_point_width_at_most_8_ulp(fn, lo, hi):
    rng = np.random.default_rng(7)
    for x in rng.uniform(lo, hi, 2000):
        r = fn(Interval(float(x)))
        assert r.hi - r.lo <= 8 * math.ulp(r.mid())


# -- monotonicity (hypothesis) ----------------------------------------------

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def _nested(x, y, z, w):
    """Pair a subset a of a' built from four floats."""
    lo, a_lo, a_hi, hi = sorted((x, y, z, w))
    return Interval(a_lo, a_hi), Interval(lo, hi)


UNARY = [
    ("exp", lambda v: exp(v), (-300.0, 300.0)),
    ("sqrt", lambda v: sqrt(v), (0.0, 1e6)),
    ("log", lambda v: log(v), (1e-9, 1e6)),
    ("sin", lambda v: sin(v), (-1e3, 1e3)),
    ("cos", lambda v: cos(v), (-1e3, 1e3)),
    ("sqr", lambda v: v.sqr(), (-1e3, 1e3)),
    ("cube", lambda v: pow_int(v, 3), (-1e3, 1e3)),
    ("neg", lambda v: -v, (-1e6, 1e6)),
]


@pytest.mark.parametrize("name, fn, dom", UNARY, ids=[u[0] for u in UNARY])
@settings(max_examples=300, deadline=None)
@given(vals=st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)))
def test_unary_inclusion_monotone(name, fn, dom, vals):
    lo, hi = dom
    pts = [lo + (hi - lo) * v for v in vals]
    inner, outer = _nested(*pts)
    assert fn(inner).subset(fn(outer))


@settings(max_examples=500, deadline=None)
@given(finite, finite, finite, finite, finite, finite, finite, finite)
def test_binary_inclusion_monotone(a, b, c, d, e, f, g, h):
    x, X = _nested(a, b, c, d)
    y, Y = _nested(e, f, g, h)
    assert (x + y).subset(X + Y)
    assert (x - y).subset(X - Y)
    assert (x * y).subset(X * Y)
    if Y.lo > 0.0 or Y.hi < 0.0:
        try:
            outer = X / Y
        except DomainError:
            # the superset quotient overflows; there is no finite enclosure to compare
            return
        assert (x / y).subset(outer)


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite, finite, st.floats(0, 1), st.floats(0, 1))
def test_complex_product_contains_point_products(a, b, c, d, t, u):
    z = ComplexInterval(Interval(min(a, b), max(a, b)), Interval(-1.0, 1.0))
    w = ComplexInterval(Interval(min(c, d), max(c, d)), Interval(0.5, 2.0))
    # clamp: lo + t (hi - lo) can round one ulp past hi
    zp = complex(min(z.re.hi, z.re.lo + t * (z.re.hi - z.re.lo)), -1.0 + 2.0 * u)
    wp = complex(min(w.re.hi, w.re.lo + u * (w.re.hi - w.re.lo)), 0.5 + 1.5 * t)
    prod = z * w
    exact = mpmath.mpc(zp) * mpmath.mpc(wp)
    assert _encloses(prod.re, exact.real) and _encloses(prod.im, exact.imag)
    quot = z / w
    exact_q = mpmath.mpc(zp) / mpmath.mpc(wp)
    assert _encloses(quot.re, exact_q.real) and _encloses(quot.im, exact_q.imag)
