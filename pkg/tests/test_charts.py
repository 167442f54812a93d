import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cse_kit.charts import (ChartData, ChartError, chart_asymptotic, cse_from_charts, h_poles, itilde,
                            itilde_estimate, itilde_exact)
from cse_kit.mc_verify import fit_asymptotics

F = Fraction
IDENTITY = ((1, 0, 0), (1, 0, 0))


def test_h_poles_examples():
    assert h_poles(IDENTITY, 0) == [(1, 2)]
    assert h_poles([(2, 1, 0), (3, 0, 1)], 1) == [(F(2, 3), 1), (1, 1)]
    assert h_poles([(1, 0, 0)], 0) == [(1, 1)]
    # coordinates with a = 0 carry no pole
    assert h_poles([(0, 4, 0), (2, 0, 0)], 0) == [(F(1, 2), 1)]


def test_cse_from_charts_examples():
    assert cse_from_charts([IDENTITY]) == (1, 2)
    assert cse_from_charts([[(2, 1, 0), (3, 0, 0)]]) == (F(1, 3), 1)
    assert cse_from_charts([[(1, 0, 0)], [(2, 1, 0)]]) == (1, 1)


def test_invalid_charts():
    with pytest.raises(ChartError):
        ChartData((((0, 1, 0), (0, 0, 0)),))
    with pytest.raises(ChartError):
        ChartData((((1, -1, 0),),))
    with pytest.raises(ChartError):
        ChartData.from_json('{"nope": 1}')
    assert ChartData.from_json('[[[1,0,0],[1,0,0]]]').charts == (IDENTITY,)


def test_json_round_trip():
    cd = ChartData((IDENTITY, ((2, 1, 0),)))
    assert ChartData.from_json(cd.to_json()) == cd


@pytest.mark.parametrize("chart,t,want", [
    (((1, 0, 0),), 0.25, 0.25 ** 2 / 2),
    (((2, 0, 0),), 0.25, 0.125),
    (IDENTITY, 0.1, 0.1 ** 2 / 4 + 0.1 ** 2 / 2 * math.log(10)),
])
def test_itilde_examples(chart, t, want):
    assert itilde_exact(chart, 0, t) == pytest.approx(want, rel=1e-10)


def test_itilde_identity_to_1e8():
    for t in (1e-1, 1e-2, 1e-3, 1e-4):
        want = t * t / 4 + t * t / 2 * math.log(1 / t)
        assert abs(itilde_exact(IDENTITY, 0, t) / want - 1) < 1e-8


def test_three_coordinates_against_quasi_random():
    chart = ((1, 0, 1), (2, 1, 0), (1, 0, 0))
    exact = itilde_exact(chart, 1, 0.05)
    est, se = itilde_estimate(chart, 1, 0.05, samples=2**15, replicates=16, seed=3)
    assert abs(est - exact) < 4 * se + 1e-3 * exact


def test_four_coordinates_fall_back():
    chart = ((1, 0, 0),) * 4
    with pytest.raises(ValueError):
        itilde_exact(chart, 0, 0.1)
    assert itilde(chart, 0, 0.5) > 0


def test_chart_asymptotic_examples():
    r, w = chart_asymptotic([IDENTITY], 0)
    assert (r.power, r.logpow, w.power, w.logpow) == (2, 1, 1, 1)
    r, _ = chart_asymptotic([((1, 0, 0),)], 0)
    assert (r.power, r.logpow) == (2, 0)
    r, _ = chart_asymptotic([((2, 0, 0), (2, 0, 0))], 0)
    assert (r.power, r.logpow) == (1, 1)


def test_slope_fit_recovers_law():
    t = np.logspace(-6, -3, 10)
    for chart in (IDENTITY, ((2, 0, 0), (2, 0, 0)), ((1, 0, 0), (2, 1, 0), (3, 0, 0))):
        law, _ = chart_asymptotic([chart], 0)
        vals = [itilde_exact(chart, 0, x) for x in t]
        fit = fit_asymptotics(t, vals, n=len(chart))
        assert abs(fit.p - float(law.power)) <= 0.05 * float(law.power)
        assert fit.q == law.logpow


# -- properties ---------------------------------------------------------------

triple = st.tuples(st.integers(0, 3), st.integers(0, 2), st.integers(0, 2))
chart = st.lists(triple, min_size=1, max_size=3).filter(lambda c: any(a for a, _, _ in c))


@settings(max_examples=40, deadline=None)
@given(chart, st.integers(0, 2))
def test_itilde_monotone_and_full_product(ch, tau):
    vals = [itilde_exact(ch, tau, t) for t in (1e-4, 1e-3, 1e-2, 1e-1, 1.0)]
    assert all(a <= b * (1 + 1e-12) for a, b in zip(vals, vals[1:]))
    full = math.prod(1 / (2 * b + 2 * c * tau + 2) for _, b, c in ch)
    assert vals[-1] == pytest.approx(full, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(chart, min_size=1, max_size=3), st.lists(chart, min_size=1, max_size=3), st.integers(0, 2))
def test_aggregation_rule(A, B, tau):
    ba, aa = cse_from_charts(A, tau)
    bb, ab = cse_from_charts(B, tau)
    beta, alpha = cse_from_charts(A + B, tau)
    assert beta == min(ba, bb)
    assert alpha == max(a for b, a in ((ba, aa), (bb, ab)) if b == beta)
    r, w = chart_asymptotic(A + B, tau)
    assert (r.power, r.logpow, w.power, w.logpow) == (2 * beta, alpha - 1, beta, alpha - 1)
