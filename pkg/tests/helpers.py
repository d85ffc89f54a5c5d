"""Independent numerical oracles shared by the test suite.

These deliberately avoid the library's own integration and interval code:
distances come from sorted-quantile transport, gaps from dense trapezoid
grids, payments from Riemann-Stieltjes sums against the allocation, so each
check pits two genuinely different computations against each other.
"""

import numpy as np

from robustmech import Empirical


def sorted_quantile_transport(p: Empirical, q: Empirical) -> float:
    """Exact 1-D optimal transport between discrete distributions.

    Integrates |F_p^{-1}(u) - F_q^{-1}(u)| over u by matching sorted quantile
    segments.
    """
    vp = np.asarray([v for v, _ in p.atoms])
    cp = np.cumsum([m for _, m in p.atoms])
    vq = np.asarray([v for v, _ in q.atoms])
    cq = np.cumsum([m for _, m in q.atoms])
    cp[-1] = cq[-1] = 1.0
    levels = np.unique(np.concatenate([[0.0], cp, cq]))
    total = 0.0
    for lo, hi in zip(levels[:-1], levels[1:]):
        if hi <= lo:
            continue
        mid = 0.5 * (lo + hi)
        xp = vp[np.searchsorted(cp, mid, side="left")]
        xq = vq[np.searchsorted(cq, mid, side="left")]
        total += (hi - lo) * abs(float(xp) - float(xq))
    return total


def trapezoid_gap(dist, pi: float, n: int = 1_000_000) -> float:
    """Dense-grid quadrature of the positive part of (ccdf(x) - pi/x))."""
    xs = np.linspace(1.0 / n, 1.0, n)
    integrand = np.clip(dist.ccdf(xs) - pi / xs, 0.0, None)
    return float(np.trapezoid(integrand, xs))


def trapezoid_ccdf_distance(ccdf_a, ccdf_b, n: int = 1_000_000) -> float:
    """Dense-grid quadrature of |ccdf_a(x) - ccdf_b(x)| on (0, 1]."""
    xs = np.linspace(1.0 / n, 1.0, n)
    return float(np.trapezoid(np.abs(ccdf_a(xs) - ccdf_b(xs)), xs))


def stieltjes_payment(mech, v: float, panels_per_interval: int = 400_000) -> float:
    """Riemann-Stieltjes integral of x dq(x) over [0, v] using only q values."""
    total = 0.0
    for u, w in mech.intervals:
        hi = min(w, v)
        if hi <= u:
            continue
        xs = np.linspace(u, hi, panels_per_interval + 1)
        q = mech.allocation(xs)
        mids = 0.5 * (xs[1:] + xs[:-1])
        total += float(np.dot(mids, np.diff(q)))
    return total


def allocation_integral(mech, v: float, n: int = 400_001) -> float:
    """Quadrature of the allocation over [0, v] (equals the buyer surplus)."""
    xs = np.linspace(0.0, v, n)
    return float(np.trapezoid(mech.allocation(xs), xs))


def random_empirical(rng: np.random.Generator, max_atoms: int = 10) -> Empirical:
    n = int(rng.integers(1, max_atoms + 1))
    values = np.sort(rng.random(n))
    masses = rng.random(n) + 0.05
    masses = masses / masses.sum()
    return Empirical(tuple(zip(values.tolist(), masses.tolist())))


def skewness_se(n: int) -> float:
    """Approximate standard error of a sample skewness estimate."""
    return np.sqrt(6.0 / n)
