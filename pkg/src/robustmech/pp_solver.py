"""Deterministic posted-price satisficing solver.

The fragility-adjusted posted revenue is the reference expectation of
min{p, k (v - p)^+}: a buyer below the price contributes nothing, a buyer
within p/k above it contributes the fragility-scaled surplus gap, and higher
buyers contribute the full price.  It is concave in p, increasing in k, and
piecewise linear in p for empirical references with kinks only at
{k/(k+1) * atom} and the atoms themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .distributions import Empirical, ValuationDistribution, max_posted_revenue
from .errors import DomainError, InfeasibleTargetError
from .isorevenue import cut
from .mechanisms import PostedPrice
from .numerics import bisect_root, expand_bracket_up, golden_section_max

__all__ = [
    "PPSolveReport",
    "rho_pp",
    "optimal_price_given_k",
    "solve_pp",
    "solve_pp_two_point",
]

FEASIBILITY_MARGIN = 1e-9
K_CAP = 1e6


@dataclass(frozen=True)
class PPSolveReport:
    """Optimal posted price and fragility for one (reference, target) instance."""

    tau: float
    k_pp: float
    p_pp: float
    rho_at_solution: float
    mechanism: PostedPrice
    iterations: int
    residual: float
    warnings: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "tau": self.tau,
            "k_pp": self.k_pp,
            "p_pp": self.p_pp,
            "rho_at_solution": self.rho_at_solution,
            "mechanism": self.mechanism.to_json(),
            "iterations": self.iterations,
            "residual": self.residual,
            "warnings": list(self.warnings),
        }


def rho_pp(dist: ValuationDistribution, p: float, k: float) -> float:
    """Fragility-adjusted posted revenue E[min{p, k (v - p)^+}] at price p."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"price {p!r} outside [0, 1]")
    if not k > 0.0:
        raise DomainError(f"fragility must be positive, got {k!r}")
    if p == 0.0:
        return 0.0
    if isinstance(dist, Empirical):
        return math.fsum(
            m * min(k * max(v - p, 0.0), p) for v, m in dist.atoms
        )
    # the integrand is continuous piecewise linear in v with slope k on
    # [p, (1+1/k) p], so the expectation reduces to a CCDF partial integral
    upper = min((1.0 + 1.0 / k) * p, 1.0)
    return k * dist.ccdf_integral(p, upper)


def _pp_candidates(dist: Empirical, k: float) -> list[float]:
    scale = k / (k + 1.0)
    cands = {scale * v for v, _ in dist.atoms}
    cands.update(v for v, _ in dist.atoms)
    return [c for c in cands if 0.0 < c <= 1.0]


def _optimal_price_regular(dist: ValuationDistribution, k: float) -> float | None:
    """Iso-revenue route: the unique level c with price ratio (k+1)/k.

    Returns None when a cut with other than two crossing prices shows up,
    signalling that the quasi-concave characterization does not apply.
    """
    pi0, _ = max_posted_revenue(dist)
    target = math.log((k + 1.0) / k)
    bad = False

    def f(c: float) -> float:
        nonlocal bad
        cc = cut(dist, c)
        if cc.count > 1:
            bad = True
            return 0.0
        if cc.count == 0:
            return -target  # tangency at the top: ratio has reached 1
        u, w = cc.intervals[0]
        return math.log(w / u) - target

    res = bisect_root(f, 0.0, pi0, flo=math.inf)
    if bad:
        return None
    c = cut(dist, res.root)
    if c.count != 1:
        return None
    return c.intervals[0][0]


def _optimal_price_scan(dist: ValuationDistribution, k: float) -> float:
    """Concavity-backed fallback: coarse scan then golden-section refinement."""
    n = 1001
    best_i, best_v = 0, -1.0
    for i in range(n):
        p = i / (n - 1)
        v = rho_pp(dist, p, k)
        if v > best_v:
            best_i, best_v = i, v
    lo = max((best_i - 1) / (n - 1), 0.0)
    hi = min((best_i + 1) / (n - 1), 1.0)
    p, _ = golden_section_max(lambda q: rho_pp(dist, q, k), lo, hi)
    return p


def optimal_price_given_k(dist: ValuationDistribution, k: float) -> float:
    """Price maximizing the fragility-adjusted posted revenue for fixed k."""
    if not k > 0.0:
        raise DomainError(f"fragility must be positive, got {k!r}")
    if isinstance(dist, Empirical):
        cands = _pp_candidates(dist, k)
        return max(cands, key=lambda p: rho_pp(dist, p, k))
    if dist.is_regular:
        p = _optimal_price_regular(dist, k)
        if p is not None:
            return p
    return _optimal_price_scan(dist, k)


def solve_pp(dist: ValuationDistribution, tau: float) -> PPSolveReport:
    """Minimal fragility k with max_p rho_pp(p, k) = tau, and its price."""
    pi0, _ = max_posted_revenue(dist)
    if not tau > 0.0 or tau >= pi0 - FEASIBILITY_MARGIN:
        raise InfeasibleTargetError(tau, pi0)
    warnings: list[str] = []

    def f(k: float) -> float:
        return rho_pp(dist, optimal_price_given_k(dist, k), k) - tau

    lo, hi, flo, fhi = expand_bracket_up(f, 1e-9, 1.0, cap=K_CAP)
    while flo > 0.0 and lo > 1e-18:
        hi, fhi = lo, flo
        lo *= 0.5
        flo = f(lo)
    if fhi < 0.0:
        warnings.append(
            f"fragility hit the search cap {K_CAP:g}; target is numerically "
            "indistinguishable from the posted-price optimum"
        )
        k_pp = hi
        it, resid = 0, fhi
    else:
        # rho^PP*(k) flattens at large k, so a residual stop would leave k
        # orders looser than the bracket: drive the bracket width down instead
        res = bisect_root(f, lo, hi, flo=flo, fhi=fhi, ftol=0.0)
        k_pp = res.root
        it, resid = res.iterations, res.residual
    p = optimal_price_given_k(dist, k_pp)
    rho = rho_pp(dist, p, k_pp)
    return PPSolveReport(
        tau=tau,
        k_pp=k_pp,
        p_pp=p,
        rho_at_solution=rho,
        mechanism=PostedPrice(p),
        iterations=it,
        residual=resid,
        warnings=tuple(warnings),
    )


def solve_pp_two_point(
    v1: float, a1: float, v2: float, a2: float, tau: float
) -> PPSolveReport:
    """Closed-form posted-price solution for a two-atom reference.

    The optimum sits at one of the two candidate prices k/(k+1) * atom; which
    one, and which fragility branch applies, depends on how the target
    compares with (1 - a1) v1 and on whether v1 exceeds (1 - a1) v2.
    """
    if not (0.0 < v1 < v2 <= 1.0):
        raise DomainError("need 0 < v1 < v2 <= 1")
    if not (a1 > 0.0 and a2 > 0.0 and abs(a1 + a2 - 1.0) <= 1e-9):
        raise DomainError("atom masses must be positive and sum to 1")
    mu0 = a1 * v1 + a2 * v2
    pi0 = max(v1, (1.0 - a1) * v2)
    if not tau > 0.0 or tau >= pi0 - FEASIBILITY_MARGIN:
        raise InfeasibleTargetError(tau, pi0)
    warnings: list[str] = []
    low_branch_edge = (1.0 - a1) * v1
    if abs(tau - low_branch_edge) <= 1e-12:
        warnings.append("target sits on a fragility branch boundary")
    if tau <= low_branch_edge:
        disc = (mu0 - tau) ** 2 - 4.0 * a1 * tau * (v2 - v1)
        k = (mu0 - tau - math.sqrt(max(disc, 0.0))) / (2.0 * a1 * (v2 - v1))
        p = k / (k + 1.0) * v2
    elif v1 <= (1.0 - a1) * v2:
        k = tau / ((1.0 - a1) * v2 - tau)
        p = k / (k + 1.0) * v2
    else:
        k = tau / (v1 - tau)
        p = k / (k + 1.0) * v1
    dist = Empirical(((v1, a1), (v2, a2)))
    return PPSolveReport(
        tau=tau,
        k_pp=k,
        p_pp=p,
        rho_at_solution=rho_pp(dist, p, k),
        mechanism=PostedPrice(p),
        iterations=0,
        residual=0.0,
        warnings=tuple(warnings),
    )
