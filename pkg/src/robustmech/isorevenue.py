"""Iso-revenue cuts of a reference distribution.

For a revenue level pi, the cut collects the maximal intervals on which the
reference CCDF weakly exceeds the iso-revenue curve pi/x, together with the
Wasserstein gap between the truncated iso-revenue distribution
min{ccdf, pi/x} and the reference.  These objects drive every solver: the
gap's root locates worst-case-optimal revenue, and the interval log-ratios
drive the fragility first-order condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    Empirical,
    ValuationDistribution,
    _scan_grid,
    max_posted_revenue,
)
from .errors import DomainError, InfeasibleLevelError
from .numerics import refine_crossing

__all__ = ["IsoRevenueCut", "cut", "gap_only", "worst_case_ccdf"]

#: intervals narrower than this are tangency artifacts and carry no measure
_TANGENCY_WIDTH = 1e-9
#: tie band for a crossing landing exactly on an empirical atom
_TIE_BAND = 1e-12


@dataclass(frozen=True)
class IsoRevenueCut:
    """Intervals where the reference revenue curve stays at or above ``pi``.

    ``gap`` is the Wasserstein distance from the truncated iso-revenue
    distribution to the reference; ``log_sum`` is the sum of ln(w/u) over the
    intervals (reported as +inf when the cut starts at 0, which happens only
    at pi = 0).  ``tie_points`` records empirical atoms hit exactly by a
    crossing; such intervals are kept separate rather than merged.
    """

    pi: float
    intervals: tuple[tuple[float, float], ...]
    gap: float
    log_sum: float
    tie_points: tuple[float, ...] = field(default=())

    @property
    def count(self) -> int:
        return len(self.intervals)

    def to_json(self) -> dict:
        return {
            "pi": self.pi,
            "intervals": [[u, w] for u, w in self.intervals],
            "gap": self.gap,
            "log_sum": self.log_sum,
            "tie_points": list(self.tie_points),
        }


def _validate_level(dist: ValuationDistribution, pi: float) -> float:
    if pi < 0.0:
        raise DomainError(f"revenue level must be nonnegative, got {pi}")
    pi0, _ = max_posted_revenue(dist)
    if pi > pi0 * (1.0 + 1e-12) + 1e-15:
        raise InfeasibleLevelError(pi, pi0)
    return pi0


def _empirical_regions(dist: Empirical, pi: float):
    """Exact interval arithmetic on the CCDF steps of an empirical reference.

    On a step of height L the crossing of the iso-revenue curve is x = pi/L;
    intervals are merged through an atom only when the curve passes strictly
    below the step there, matching the half-open [u, w) convention.
    """
    values = [v for v, _ in dist.atoms]
    masses = [m for _, m in dist.atoms]
    remaining = 1.0
    segments = []  # (left, right, CCDF level) pieces of the step function
    prev = 0.0
    for v, m in zip(values, masses):
        if v > prev:
            segments.append((prev, v, remaining))
        remaining -= m
        prev = v
    intervals: list[tuple[float, float]] = []
    ties: list[float] = []
    for a, b, level in segments:
        if level <= 0.0:
            continue
        crossing = pi / level
        if crossing >= b:
            continue
        lo = max(a, crossing)
        if intervals and lo <= a + _TIE_BAND:
            prev_u, prev_w = intervals[-1]
            if abs(prev_w - a) <= _TIE_BAND:
                if crossing < a - _TIE_BAND:
                    intervals[-1] = (prev_u, b)
                    continue
                # crossing lands exactly on the atom: keep intervals separate
                ties.append(a)
        intervals.append((lo, b))
    return intervals, ties


def _continuous_regions(dist: ValuationDistribution, pi: float):
    """Sign-change scan of g(x) = x * ccdf(x) - pi, refined by bisection."""
    xs, g = _scan_grid(dist)

    def f(x: float) -> float:
        return x * float(dist._ccdf(np.asarray(x))) - pi

    mask = g >= pi
    edges = np.flatnonzero(mask[1:] != mask[:-1])
    starts: list[float] = []
    ends: list[float] = []
    if mask[0]:
        # the revenue curve exceeds pi already at the first grid point;
        # the crossing lies in (0, xs[0]] since g -> 0 at 0+
        starts.append(refine_crossing(f, 0.0, float(xs[0]), flo=-pi))
    for j in edges:
        x = refine_crossing(f, float(xs[j]), float(xs[j + 1]))
        if mask[j]:
            ends.append(x)
        else:
            starts.append(x)
    if mask[-1]:
        ends.append(1.0)
    intervals = [(u, w) for u, w in zip(starts, ends)]
    return intervals, []


def cut(dist: ValuationDistribution, pi: float) -> IsoRevenueCut:
    """Compute the iso-revenue cut of ``dist`` at revenue level ``pi``.

    Requires 0 <= pi <= max posted revenue.  At pi = 0 the cut spans all of
    (0, 1]; its log-ratio sum is +inf and the gap equals the reference mean.
    """
    _validate_level(dist, pi)
    if pi == 0.0:
        return IsoRevenueCut(0.0, ((0.0, 1.0),), dist.mean(), math.inf)
    if isinstance(dist, Empirical):
        raw, ties = _empirical_regions(dist, pi)
    else:
        raw, ties = _continuous_regions(dist, pi)
    intervals = tuple((u, w) for u, w in raw if w - u >= _TANGENCY_WIDTH)
    gap = 0.0
    log_sum = 0.0
    for u, w in intervals:
        gap += dist.ccdf_integral(u, w) - pi * math.log(w / u)
        log_sum += math.log(w / u)
    return IsoRevenueCut(pi, intervals, max(gap, 0.0), log_sum, tuple(ties))


def gap_only(dist: ValuationDistribution, pi: float) -> float:
    """The Wasserstein gap d(pi) alone; same value as ``cut(...).gap``."""
    return cut(dist, pi).gap


def worst_case_ccdf(dist: ValuationDistribution, pi: float, x):
    """CCDF of the truncated iso-revenue distribution min{ccdf(x), pi/x}."""
    _validate_level(dist, pi)
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0.0) or np.any(xs > 1.0):
        raise DomainError("valuation outside (0, 1]")
    out = np.clip(np.minimum(dist._ccdf(xs), pi / xs), 0.0, 1.0)
    return float(out) if np.ndim(x) == 0 else out
