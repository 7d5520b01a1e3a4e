"""Threshold search and the verify_at gate chain."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfstokes import thresholds as th
from hopfstokes.errors import SearchExhausted, ThresholdError
from hopfstokes.interval import Interval
from hopfstokes.problems import LedgerInputs, ProblemSpec, example1, example2, make_field
from hopfstokes.thresholds import find_thresholds, gate_contraction, gate_lipschitz, verify_at

RHO_STAR_EX = Interval.from_decimal("15.99999965").hull(Interval.from_decimal("16.00000035"))


def _zero_problem() -> ProblemSpec:
    return ProblemSpec("zero", LedgerInputs(alpha=1.0, b=1.0, a3=0j), make_field(1.0, 1.0, quadratic=False))


@pytest.mark.parametrize("make", [example1, example2])
def test_rho_star_below_9_79(make):
    t = find_thresholds(make())
    assert t.rho1 <= t.rho2 <= t.rho_star <= t.rho0
    assert t.rho_star <= 9.79
    verify_at(make(), t.rho0)


def test_zero_ledger_collapses_to_scan_start():
    t = find_thresholds(_zero_problem(), scan_start=3.0)
    assert (t.rho1, t.rho2, t.rho_star, t.rho0) == (3.0, 3.0, 3.0, 3.0)


@pytest.mark.parametrize("rho", [2.01, 3.0, 50.0, 1e4])
def test_zero_ledger_passes_everywhere(rho):
    table = verify_at(_zero_problem(), rho)
    assert table.l.hi == 0.0 and table.a.hi == 0.0 and table.mbar.hi == 0.0


def test_verify_at_reference_rho():
    table = verify_at(example1(), RHO_STAR_EX)
    assert table.a1.intersects(Interval(0.010155523, 0.010155525))


@pytest.mark.parametrize("make", [example1, example2])
def test_verify_at_rho_5_fails(make):
    with pytest.raises(ThresholdError) as err:
        verify_at(make(), 5.0)
    assert err.value.gate == "L<=1/2"


def test_gate_at_floor_rejected():
    with pytest.raises(ThresholdError):
        verify_at(example1(), Interval(1.5, 3.0))


def test_bad_scan_arguments():
    with pytest.raises(ValueError):
        find_thresholds(example1(), scan_start=2.0)
    with pytest.raises(ValueError):
        find_thresholds(example1(), scan_factor=1.0)


def test_search_exhausted():
    with pytest.raises(SearchExhausted):
        find_thresholds(example1(), scan_start=2.5, scan_factor=1.01, max_iters=3)


@pytest.mark.parametrize("make", [example1, example2])
def test_verify_at_idempotent_on_grid(make):
    p = make()
    t = find_thresholds(p)
    for rho in np.geomspace(t.rho0, 1e3, 60):
        verify_at(p, float(rho))


# -- never accept an undecided comparison --------------------------------------

straddle = st.tuples(st.floats(1e-6, 0.1), st.floats(1e-6, 0.1))


@settings(max_examples=200, deadline=None)
@given(straddle)
def test_lipschitz_straddling_half_rejected(eps):
    l = Interval(0.5 - eps[0], 0.5 + eps[1])
    orig = th.lipschitz
    th.lipschitz = lambda p, rho: (l, l, l)
    try:
        with pytest.raises(ThresholdError):
            gate_lipschitz(example1(), Interval(16.0))
    finally:
        th.lipschitz = orig


@settings(max_examples=200, deadline=None)
@given(straddle)
def test_contraction_straddling_half_rejected(eps):
    a = Interval(0.5 - eps[0], 0.5 + eps[1])
    orig = th.contraction_a
    th.contraction_a = lambda p, rho: (a, a, a)
    try:
        with pytest.raises(ThresholdError):
            gate_contraction(example1(), Interval(16.0))
    finally:
        th.contraction_a = orig
