"""Problem model: ledger inputs, field enclosures versus an mpmath oracle."""

from __future__ import annotations

import mpmath
import numpy as np
import pytest

from hopfstokes.errors import DomainError
from hopfstokes.interval import Interval
from hopfstokes.problems import eval_field, example1, example2, get_problem
from hopfstokes.state import StateBox

mpmath.mp.prec = 120


def _oracle(point, quadratic: bool, alpha=1, b=1):
    """Complex form phi' = (-i a + 1/s) phi + F, varphi' = (i a + 1/s) varphi + F, s' = 1 + b s^2 phi varphi."""
    x1, y1, x2, y2, s1, s2 = (mpmath.mpf(v) for v in point)
    phi, vphi, s = mpmath.mpc(x1, y1), mpmath.mpc(x2, y2), mpmath.mpc(s1, s2)
    forcing = -1 / s**3
    if quadratic:
        forcing += 1j / s * (phi**2 - vphi**2)
    dphi = (-1j * alpha + 1 / s) * phi + forcing
    dvphi = (1j * alpha + 1 / s) * vphi + forcing
    ds = 1 + b * s**2 * phi * vphi
    return [dphi.real, dphi.imag, dvphi.real, dvphi.imag, ds.real, ds.imag]


def test_example1_ledger():
    led = example1().ledger
    assert (led.alpha, led.b, led.a3, led.h0) == (1.0, 1.0, 1 + 0j, 0.0)
    assert led.cF0 == led.cH0 == led.cH0bar == led.cH == led.cHphi == led.cHvarphi == 0.0
    assert led.cFphi == led.cFvarphi == 0.0


def test_example2_ledger_and_override():
    p = example2()
    led = p.ledger
    assert led.cF == 2.0 and led.cFphi == 1.0 and led.cFvarphi == 1.0
    assert led.a3 == 1 + 0j and led.h0 == 0.0
    assert p.m4_override is not None and p.m4_override.zero_lower_orders
    rho, m0 = Interval(16.0), Interval(22.0) / 3
    m11, m12 = p.m4_override.func(rho, m0)
    m0f, q = 22 / 3, (22 / 3) ** 2 / 16**4
    assert abs(m12.mid() - m0f / (1 - q) ** 2 * (3 + m0f * (1 + 1 / 16))) < 1e-12
    assert abs(m11.mid() - m0f / (1 - q) ** 2 * (3 + m0f * (1 + 1 / 16) * (2 - q))) < 1e-12


def test_get_problem_rejects_unknown():
    with pytest.raises(ValueError):
        get_problem("example3")


def test_example1_hand_evaluation_at_s_equal_one():
    out = eval_field(example1(), StateBox.from_components([0, 0, 0, 0, 1, 0]))
    assert out[0].contains(-1.0) and out[0].width() == 0.0
    assert out[1].contains(0.0) and out[3].contains(0.0)
    assert (out[4].lo, out[4].hi) == (1.0, 1.0)
    assert (out[5].lo, out[5].hi) == (0.0, 0.0)


@pytest.mark.parametrize("make", [example1, example2])
@pytest.mark.parametrize("s", [(0.0, -16.0), (1000.0, -16.0), (-3.0, 7.0)])
def test_s_subsystem_exact_when_xy_vanish(make, s):
    out = eval_field(make(), StateBox.from_components([0, 0, 0, 0, *s]))
    assert (out[4].lo, out[4].hi) == (1.0, 1.0)
    assert (out[5].lo, out[5].hi) == (0.0, 0.0)


@pytest.mark.parametrize("make, quadratic", [(example1, False), (example2, True)])
def test_field_matches_oracle_at_1e3_points(make, quadratic):
    p = make()
    rng = np.random.default_rng(11 if quadratic else 10)
    misses = []
    for _ in range(1000):
        r = 10.0 ** rng.uniform(1.0, 3.0)
        th = rng.uniform(0.0, 2 * np.pi)
        xy = rng.normal(size=4) * 10.0 ** rng.uniform(-9, -3)
        point = [*xy, r * np.cos(th), r * np.sin(th)]
        enc = eval_field(p, StateBox.from_components(point))
        ref = _oracle(point, quadratic)
        for iv, val in zip(enc, ref):
            if not (mpmath.mpf(iv.lo) <= val <= mpmath.mpf(iv.hi)):
                misses.append((point, iv, val))
    assert misses == []


@pytest.mark.parametrize("make", [example1, example2])
def test_widened_box_contains_point_output(make):
    p = make()
    point = [1e-6, -2e-6, 3e-7, 5e-7, -40.0, -16.0]
    narrow = eval_field(p, StateBox.from_components(point))
    wide = eval_field(p, StateBox.around(point, [1e-7, 1e-7, 1e-7, 1e-7, 0.5, 0.5]))
    assert narrow.subset(wide)


def test_box_touching_origin_is_rejected():
    box = StateBox.from_components([0, 0, 0, 0, Interval(-1.0, 1.0), Interval(-1.0, 1.0)])
    with pytest.raises(DomainError):
        eval_field(example1(), box)
