"""Robust satisficing solver.

Given a reference distribution and a revenue target tau, the solver finds the
smallest fragility k such that the target shortfall under any valuation
distribution P is bounded by k times the Wasserstein distance of P from the
reference.  The search runs over two nested monotone scalar equations:

* for fixed k, the worst-case revenue pi*(k) is the unique root of
  sum_j ln(w_j/u_j) = 1/k over the iso-revenue cut intervals, and
* the minimal fragility-adjusted revenue rho*(k) = k * sum_j int_{u_j}^{w_j}
  ccdf is strictly increasing in k, so k* solves rho*(k) = tau by bisection.

The optimal mechanism is the randomized log menu on the cut at pi*(k*).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .distributions import ValuationDistribution, max_posted_revenue
from .errors import InfeasibleTargetError
from .isorevenue import IsoRevenueCut, cut, gap_only
from .mechanisms import RandomizedLogMechanism
from .numerics import bisect_root, expand_bracket_up

__all__ = ["SolveReport", "fragility_adjusted_revenue", "pi_star", "rho_star", "solve"]

#: targets closer to the posted-price optimum than this are rejected: the
#: fragility diverges as tau approaches the maximum posted revenue
FEASIBILITY_MARGIN = 1e-9
#: fragility cap for the bracket expansion
K_CAP = 1e6


@dataclass(frozen=True)
class SolveReport:
    """Robust satisficing solution for one (reference, target) instance."""

    tau: float
    k_star: float
    pi_star: float
    rho_at_solution: float
    intervals: tuple[tuple[float, float], ...]
    mechanism: RandomizedLogMechanism
    iterations: int
    residual: float
    warnings: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "tau": self.tau,
            "k_star": self.k_star,
            "pi_star": self.pi_star,
            "rho_at_solution": self.rho_at_solution,
            "intervals": [[u, w] for u, w in self.intervals],
            "mechanism": self.mechanism.to_json(),
            "iterations": self.iterations,
            "residual": self.residual,
            "warnings": list(self.warnings),
        }


def fragility_adjusted_revenue(
    dist: ValuationDistribution, pi: float, k: float
) -> float:
    """rho(pi, k) = pi + k * d(pi): convex in pi with a unique minimum."""
    return pi + k * gap_only(dist, pi)


def _pi_star_cut(
    dist: ValuationDistribution,
    k: float,
    *,
    ftol: float | None = None,
    xtol: float | None = None,
) -> tuple[IsoRevenueCut, int, float]:
    """Root of log_sum(cut(pi)) = 1/k, returned together with its cut."""
    if not k > 0.0:
        raise ValueError(f"fragility must be positive, got {k}")
    pi0, _ = max_posted_revenue(dist)
    target = 1.0 / k

    # the root pi*(k) scales like exp(-1/k) for small k, so bisect in the log
    # of the level: the tolerance then bounds the RELATIVE error at any scale
    def f(t: float) -> float:
        ls = cut(dist, math.exp(t)).log_sum
        return ls - target if math.isfinite(ls) else math.inf

    t_lo = -700.0  # level below any representable revenue of interest
    t_hi = math.log(pi0)
    f_lo = f(t_lo)
    if f_lo <= 0.0:
        # fragility so small the root underflows; report the floor level
        c = cut(dist, math.exp(t_lo))
        return c, 0, f_lo
    res = bisect_root(f, t_lo, t_hi, xtol=xtol, ftol=ftol, flo=f_lo)
    c = cut(dist, math.exp(res.root))
    if not c.intervals:
        # back off when the tangency interval is narrower than the scan
        # resolution (extremely large k pushes pi* against the maximum)
        for eps in (1e-9, 1e-6, 1e-3):
            c = cut(dist, math.exp(res.root) * (1.0 - eps))
            if c.intervals:
                break
    return c, res.iterations, res.residual


def pi_star(dist: ValuationDistribution, k: float) -> float:
    """Worst-case revenue pi*(k): minimizer of the fragility-adjusted revenue."""
    c, _, _ = _pi_star_cut(dist, k)
    return c.pi


def rho_star(dist: ValuationDistribution, k: float) -> float:
    """Minimal fragility-adjusted revenue rho*(k); strictly increasing in k."""
    c, _, _ = _pi_star_cut(dist, k)
    return k * math.fsum(dist.ccdf_integral(u, w) for u, w in c.intervals)


def solve(dist: ValuationDistribution, tau: float) -> SolveReport:
    """Solve the satisficing problem: k* with rho*(k*) = tau, plus the mechanism.

    Requires 0 < tau < max posted revenue of the reference (strictly: at the
    boundary the fragility diverges).
    """
    pi0, _ = max_posted_revenue(dist)
    if not tau > 0.0 or tau >= pi0 - FEASIBILITY_MARGIN:
        raise InfeasibleTargetError(tau, pi0)
    warnings: list[str] = []

    def f(k: float) -> float:
        return rho_star(dist, k) - tau

    lo, hi, flo, fhi = expand_bracket_up(f, 1e-9, 1.0, cap=K_CAP)
    while flo > 0.0 and lo > 1e-18:
        # vanishing targets need fragilities below the nominal bracket floor
        hi, fhi = lo, flo
        lo *= 0.5
        flo = f(lo)
    if fhi < 0.0:
        warnings.append(
            f"fragility hit the search cap {K_CAP:g}; target is numerically "
            "indistinguishable from the posted-price optimum"
        )
        k_star = hi
        res_iter, res_resid = 0, fhi
    else:
        res = bisect_root(f, lo, hi, flo=flo, fhi=fhi)
        k_star = res.root
        res_iter, res_resid = res.iterations, res.residual
    c, _, _ = _pi_star_cut(dist, k_star)
    mech = RandomizedLogMechanism.from_cut(c)
    rho = k_star * math.fsum(dist.ccdf_integral(u, w) for u, w in c.intervals)
    return SolveReport(
        tau=tau,
        k_star=k_star,
        pi_star=c.pi,
        rho_at_solution=rho,
        intervals=c.intervals,
        mechanism=mech,
        iterations=res_iter,
        residual=res_resid,
        warnings=tuple(warnings),
    )
