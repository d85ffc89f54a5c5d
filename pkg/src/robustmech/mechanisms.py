"""Direct selling mechanisms: randomized log-allocation menus and posted prices.

A mechanism is an incentive-compatible, individually-rational pair
(allocation q, payment m) on [0, 1].  The robust solvers all produce the same
family: q grows logarithmically on a union of intervals (so the payment is
piecewise linear with a single slope), which is exactly a randomized-price
menu whose price CDF is q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .isorevenue import IsoRevenueCut

__all__ = ["RandomizedLogMechanism", "PostedPrice", "PriceStatistics", "Mechanism"]


@dataclass(frozen=True)
class PriceStatistics:
    mean: float
    variance: float
    skewness: float


def _check_valuation(v):
    vs = np.asarray(v, dtype=float)
    if np.any(vs < -1e-12) or np.any(vs > 1.0 + 1e-12):
        raise DomainError("valuation outside [0, 1]")
    return np.clip(vs, 0.0, 1.0), vs.ndim == 0


@dataclass(frozen=True)
class RandomizedLogMechanism:
    """Log-allocation mechanism on a union of intervals [(u_j, w_j)].

    The payment slope equals 1 / sum(ln(w_j/u_j)) by construction, which makes
    the allocation continuous, nondecreasing, and exactly 1 from the last
    interval's right endpoint onward.  Read as a randomized-price menu, the
    allocation is the CDF of the random price, whose density is slope/v on the
    intervals.

    ``cut_level`` records the revenue level of the iso-revenue cut the
    intervals came from (the solver's worst-case revenue).
    """

    intervals: tuple[tuple[float, float], ...]
    cut_level: float
    slope: float = field(default=0.0)
    _cum_log: tuple[float, ...] = field(default=(), repr=False)
    _cum_width: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if not self.intervals:
            raise DomainError("mechanism needs at least one interval")
        ivs = tuple((float(u), float(w)) for u, w in self.intervals)
        for u, w in ivs:
            if not 0.0 < u < w <= 1.0:
                raise DomainError(f"bad interval ({u}, {w})")
        logs = [math.log(w / u) for u, w in ivs]
        slope = 1.0 / math.fsum(logs)
        cum_log = [0.0]
        cum_width = [0.0]
        for (u, w), lg in zip(ivs, logs):
            cum_log.append(cum_log[-1] + lg)
            cum_width.append(cum_width[-1] + (w - u))
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "slope", slope)
        object.__setattr__(self, "_cum_log", tuple(cum_log))
        object.__setattr__(self, "_cum_width", tuple(cum_width))

    @classmethod
    def from_cut(cls, cut: IsoRevenueCut) -> "RandomizedLogMechanism":
        return cls(intervals=cut.intervals, cut_level=cut.pi)

    @property
    def k(self) -> float:
        """Payment slope (the fragility of the satisficing solution)."""
        return self.slope

    def _locate(self, vs: np.ndarray):
        us = np.asarray([u for u, _ in self.intervals])
        ws = np.asarray([w for _, w in self.intervals])
        j_u = np.searchsorted(us, vs, side="right")  # intervals started
        j_w = np.searchsorted(ws, vs, side="right")  # intervals finished
        return us, ws, j_u, j_w

    def allocation(self, v):
        """Winning probability q(v): 0 below the menu, 1 at and above its top."""
        vs, scalar = _check_valuation(v)
        us, ws, j_u, j_w = self._locate(vs)
        cum_log = np.asarray(self._cum_log)
        inside = j_u == j_w + 1
        base = cum_log[j_w]
        with np.errstate(divide="ignore", invalid="ignore"):
            extra = np.where(
                inside, np.log(np.maximum(vs, 1e-300) / us[np.minimum(j_w, len(us) - 1)]), 0.0
            )
        out = np.minimum(self.slope * (base + extra), 1.0)
        out = np.where(vs >= ws[-1], 1.0, out)
        return float(out) if scalar else out

    def payment(self, v):
        """Payment m(v): slope inside intervals, constant elsewhere, m(0) = 0."""
        vs, scalar = _check_valuation(v)
        us, ws, j_u, j_w = self._locate(vs)
        cum_width = np.asarray(self._cum_width)
        inside = j_u == j_w + 1
        base = cum_width[j_w]
        extra = np.where(inside, vs - us[np.minimum(j_w, len(us) - 1)], 0.0)
        out = self.slope * (base + extra)
        out = np.where(vs >= ws[-1], self.slope * cum_width[-1], out)
        return float(out) if scalar else out

    def buyer_surplus(self, v):
        """q(v) v - m(v); nonnegative and nondecreasing in v."""
        vs, scalar = _check_valuation(v)
        out = self.allocation(vs) * vs - self.payment(vs)
        return float(out) if scalar else out

    def knots(self) -> np.ndarray:
        """Valuations where q or m change regime (useful as quadrature splits)."""
        pts = [0.0]
        for u, w in self.intervals:
            pts.extend((u, w))
        if pts[-1] < 1.0:
            pts.append(1.0)
        return np.asarray(pts)

    def price_statistics(self) -> PriceStatistics:
        """Moments of the random price whose CDF is the allocation.

        The price density is slope/v on each interval, so the raw moments have
        closed antiderivatives: E[p^n] = slope * sum (w^n - u^n) / n.
        """
        k = self.slope
        m1 = k * math.fsum(w - u for u, w in self.intervals)
        m2 = k * math.fsum((w * w - u * u) / 2.0 for u, w in self.intervals)
        m3 = k * math.fsum((w**3 - u**3) / 3.0 for u, w in self.intervals)
        var = m2 - m1 * m1
        central3 = m3 - 3.0 * m1 * var - m1**3
        skew = central3 / var**1.5 if var > 0.0 else 0.0
        return PriceStatistics(m1, var, skew)

    def price_quantile(self, u):
        """Inverse CDF of the random price (for inverse-CDF sampling)."""
        us_prob, scalar = _as_prob(u)
        cum_log = np.asarray(self._cum_log)
        q_breaks = self.slope * cum_log  # allocation value at each interval start
        j = np.clip(np.searchsorted(q_breaks, us_prob, side="right") - 1, 0, len(self.intervals) - 1)
        lows = np.asarray([iv[0] for iv in self.intervals])
        out = lows[j] * np.exp(us_prob / self.slope - cum_log[j])
        out = np.minimum(out, self.intervals[-1][1])
        return float(out) if scalar else out

    def to_json(self) -> dict:
        return {
            "type": "randomized_log",
            "slope": self.slope,
            "cut_level": self.cut_level,
            "intervals": [[u, w] for u, w in self.intervals],
        }

    def describe(self) -> str:
        return f"randomized_log(J={len(self.intervals)}, slope={self.slope:.6g})"


def _as_prob(u):
    us = np.asarray(u, dtype=float)
    if np.any(us < 0.0) or np.any(us > 1.0):
        raise DomainError("probability outside [0, 1]")
    return us, us.ndim == 0


@dataclass(frozen=True)
class PostedPrice:
    """Take-it-or-leave-it price: q(v) = 1(v >= p), m(v) = p 1(v >= p)."""

    price: float

    def __post_init__(self):
        if not 0.0 <= self.price <= 1.0:
            raise DomainError(f"price {self.price} outside [0, 1]")

    def allocation(self, v):
        vs, scalar = _check_valuation(v)
        out = (vs >= self.price).astype(float)
        return float(out) if scalar else out

    def payment(self, v):
        vs, scalar = _check_valuation(v)
        out = self.price * (vs >= self.price)
        return float(out) if scalar else out

    def buyer_surplus(self, v):
        vs, scalar = _check_valuation(v)
        out = np.maximum(vs - self.price, 0.0) * (vs >= self.price)
        return float(out) if scalar else out

    def knots(self) -> np.ndarray:
        return np.asarray([0.0, self.price, 1.0])

    def price_statistics(self) -> PriceStatistics:
        return PriceStatistics(self.price, 0.0, 0.0)

    def price_quantile(self, u):
        us, scalar = _as_prob(u)
        out = np.full_like(us, self.price)
        return float(out) if scalar else out

    def to_json(self) -> dict:
        return {"type": "posted_price", "price": self.price}

    def describe(self) -> str:
        return f"posted_price(p={self.price:.6g})"


Mechanism = RandomizedLogMechanism | PostedPrice
