"""Singularity exponents and sublevel integrals from resolution chart data.

A chart is a list of integer triples ``(a_j, b_j, c_j)``: on that chart
``|F o mu| ~ prod |z_j|^a_j``, ``|J_mu| ~ prod |z_j|^b_j`` and the pulled
back distinguished coordinate ``|mu_1| ~ prod |z_j|^c_j``.  Charts are
accepted as input; nothing here computes a resolution.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

Triple = tuple[int, int, int]
Chart = tuple[Triple, ...]


class ChartError(ValueError):
    pass


def validate_chart(chart: Iterable[Sequence[int]]) -> Chart:
    triples = []
    for entry in chart:
        if len(entry) != 3:
            raise ChartError(f"chart entries are [a, b, c] triples, got {entry!r}")
        a, b, c = (int(v) for v in entry)
        if a < 0 or b < 0 or c < 0 or any(int(v) != v for v in entry):
            raise ChartError(f"chart entries must be non-negative integers, got {entry!r}")
        triples.append((a, b, c))
    if not triples:
        raise ChartError("empty chart")
    if not any(a > 0 for a, _, _ in triples):
        raise ChartError("chart with all a_j = 0 carries no vanishing")
    return tuple(triples)


@dataclass(frozen=True)
class ChartData:
    charts: tuple[Chart, ...]

    def __post_init__(self):
        if not self.charts:
            raise ChartError("no charts")
        object.__setattr__(self, "charts", tuple(validate_chart(c) for c in self.charts))

    @classmethod
    def from_json(cls, text: str) -> "ChartData":
        data = json.loads(text)
        if isinstance(data, dict):
            data = data.get("charts")
        if not isinstance(data, list):
            raise ChartError("chart file must hold a list of charts")
        return cls(tuple(tuple(tuple(t) for t in ch) for ch in data))

    def to_json(self) -> str:
        return json.dumps([[list(t) for t in ch] for ch in self.charts])

    @property
    def dimension(self) -> int:
        return max(len(c) for c in self.charts)


def _exponents(chart: Chart, tau: int) -> tuple[list[int], list[int]]:
    a = [t[0] for t in chart]
    e = [2 * t[1] + 2 * t[2] * tau + 1 for t in chart]
    return a, e


def h_poles(chart: Sequence[Sequence[int]], tau: int = 0) -> list[tuple[Fraction, int]]:
    """Poles of ``c -> int_{[0,1]^n} h^(-2c) prod y_j^(2b_j+2c_j tau+1) dy``.

    Locations ``(b_j + c_j tau + 1)/a_j`` for ``a_j > 0``, with coincidences
    counted as multiplicity.
    """
    chart = validate_chart(chart)
    counts: dict[Fraction, int] = {}
    for a, b, c in chart:
        if a > 0:
            loc = Fraction(b + c * tau + 1, a)
            counts[loc] = counts.get(loc, 0) + 1
    return sorted(counts.items())


def cse_from_charts(charts: ChartData | Iterable, tau: int = 0) -> tuple[Fraction, int]:
    """``(beta, alpha)``: the weighted exponent and its log order.

    beta is the smallest pole over all charts; alpha the largest pole
    multiplicity among the charts that attain it.
    """
    if not isinstance(charts, ChartData):
        charts = ChartData(tuple(charts))
    best: Fraction | None = None
    alpha = 0
    for chart in charts.charts:
        loc, mult = h_poles(chart, tau)[0]
        if best is None or loc < best:
            best, alpha = loc, mult
        elif loc == best:
            alpha = max(alpha, mult)
    return best, alpha


# ---------------------------------------------------------------------------
# the model integral  I(t) = int_{[0,1]^n, prod y^a < t} prod y^e dy

def _full_product(e: Sequence[int]) -> float:
    return math.prod(1.0 / (x + 1) for x in e)


def _itilde_rec(a: list[int], e: list[int], t: float, epsrel: float) -> float:
    if t >= 1.0:
        return _full_product(e)
    if len(a) == 1:
        s = t ** (1.0 / a[0])
        return s ** (e[0] + 1) / (e[0] + 1)
    a1, e1, ra, re_ = a[0], e[0], a[1:], e[1:]
    ystar = t ** (1.0 / a1)
    # y1 < ystar: the remaining constraint is vacuous
    head = _full_product(re_) * ystar ** (e1 + 1) / (e1 + 1)

    def integrand(u):
        # y1 = exp(u), dy1 = y1 du
        return math.exp((e1 + 1) * u) * _itilde_rec(ra, re_, t * math.exp(-a1 * u), epsrel)

    tail, _ = integrate.quad(integrand, math.log(ystar), 0.0, epsabs=0.0, epsrel=epsrel, limit=200)
    return head + tail


def itilde_exact(chart: Sequence[Sequence[int]], tau: int, t: float, *,
                 epsrel: float = 1e-11) -> float:
    """Evaluate the chart's sublevel integral at threshold ``t`` (``0 < t``).

    Coordinates with ``a_j = 0`` factor out; the innermost remaining
    coordinate is integrated in closed form and the outer ones adaptively.
    Only up to three vanishing coordinates are handled this way; see
    :func:`itilde_estimate` beyond that.
    """
    chart = validate_chart(chart)
    if t <= 0:
        raise ValueError("t must be positive")
    a, e = _exponents(chart, tau)
    free = [x for ai, x in zip(a, e) if ai == 0]
    av = [ai for ai in a if ai > 0]
    ev = [x for ai, x in zip(a, e) if ai > 0]
    if len(av) > 3:
        raise ValueError("exact path supports at most 3 vanishing coordinates; use itilde_estimate")
    return _full_product(free) * _itilde_rec(av, ev, float(t), epsrel)


def itilde_estimate(chart: Sequence[Sequence[int]], tau: int, t: float, *,
                    samples: int = 2**16, replicates: int = 16, seed: int = 0) -> tuple[float, float]:
    """Scrambled-Sobol estimate of the sublevel integral with a standard error.

    Works in any dimension; relative accuracy degrades as ``t -> 0``.
    """
    from scipy.stats import qmc  # slow import, only needed here

    chart = validate_chart(chart)
    a, e = _exponents(chart, tau)
    a = np.array(a, dtype=float)
    e = np.array(e, dtype=float)
    ss = np.random.SeedSequence(seed)
    vals = []
    for child in ss.spawn(replicates):
        y = qmc.Sobol(len(a), scramble=True, seed=np.random.default_rng(child)).random(samples)
        logy = np.log(np.clip(y, 1e-300, None))
        inside = logy @ a < math.log(t)
        vals.append(np.mean(np.exp(logy @ e) * inside))
    vals = np.array(vals)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(replicates))


def itilde(chart, tau: int, t: float) -> float:
    """Exact path when possible, quasi-random estimate otherwise."""
    chart = validate_chart(chart)
    if sum(1 for x in chart if x[0] > 0) <= 3:
        return itilde_exact(chart, tau, t)
    return itilde_estimate(chart, tau, t)[0]


# ---------------------------------------------------------------------------

def chart_asymptotic(charts: ChartData | Iterable, tau: int = 0):
    """Laws for the sublevel integral in the ``|F|`` and ``Im w`` variables.

    With ``(beta, alpha)`` from :func:`cse_from_charts`: in the threshold
    ``s`` on ``|F|`` the integral behaves like ``s^(2 beta) |log s|^(alpha-1)``;
    under ``|F|^2 < 9 Im w`` it becomes ``(Im w)^beta |log Im w|^(alpha-1)``.
    """
    from .exponents import AsymptoticLaw

    beta, alpha = cse_from_charts(charts, tau)
    return (AsymptoticLaw(2 * beta, alpha - 1, "r_to_0"),
            AsymptoticLaw(beta, alpha - 1, "Imw_to_0"))
