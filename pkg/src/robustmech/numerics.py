"""Scalar root finding, maximization and quadrature used by the solvers.

All solver equations in this package are monotone scalar equations whose
derivatives are kinked at interval-count transitions, so plain bisection is
used throughout (never derivative-based steps).  Default tolerances: the
iteration stops as soon as |f(mid)| <= ftol or the bracket width falls below
xtol, whichever happens first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import BracketError

ROOT_FTOL = 1e-10
ROOT_XTOL = 1e-12
QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 60


@dataclass(frozen=True)
class RootResult:
    root: float
    iterations: int
    residual: float
    converged: bool


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    xtol: float | None = None,
    ftol: float | None = None,
    max_iter: int = 200,
    flo: float | None = None,
    fhi: float | None = None,
) -> RootResult:
    """Find a root of ``f`` in [lo, hi] by bisection.

    ``flo``/``fhi`` may be supplied to avoid evaluating at an endpoint (for
    instance when the function diverges there; ``math.inf`` is accepted).
    Tolerances default to the module-level ROOT_XTOL/ROOT_FTOL, read at call
    time so they can be overridden globally (the CLI exposes this).
    """
    if xtol is None:
        xtol = ROOT_XTOL
    if ftol is None:
        ftol = ROOT_FTOL
    if not lo < hi:
        raise BracketError(f"invalid bracket [{lo}, {hi}]")
    fa = f(lo) if flo is None else flo
    fb = f(hi) if fhi is None else fhi
    if fa == 0.0:
        return RootResult(lo, 0, 0.0, True)
    if fb == 0.0:
        return RootResult(hi, 0, 0.0, True)
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={fa}, {fb}")
    a, b = lo, hi
    mid = 0.5 * (a + b)
    fm = math.inf
    for it in range(1, max_iter + 1):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            # bracket has collapsed to adjacent floats
            return RootResult(mid, it, fm if math.isfinite(fm) else 0.0, True)
        fm = f(mid)
        if fm == 0.0 or abs(fm) <= ftol:
            return RootResult(mid, it, fm, True)
        if math.copysign(1.0, fm) == math.copysign(1.0, fa):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
        if b - a <= xtol:
            return RootResult(0.5 * (a + b), it, fm, True)
    return RootResult(mid, max_iter, fm, False)


def refine_crossing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    flo: float | None = None,
    fhi: float | None = None,
) -> float:
    """Bisect a bracketed sign change down to float resolution.

    Used to polish interval endpoints located by grid scans; runs until the
    bracket collapses to adjacent floats (well below 1e-12).  The iteration
    cap accommodates roots many orders of magnitude below the bracket width.
    """
    res = bisect_root(f, lo, hi, xtol=0.0, ftol=0.0, max_iter=1200, flo=flo, fhi=fhi)
    return res.root


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    iterations: int = 200,
) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on [lo, hi]; returns (argmax, max)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if b - a <= 1e-14:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _simpson(fa, fm, fb, h):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    half = 0.5 * tol
    return _adaptive(f, a, m, fa, flm, fm, left, half, depth - 1) + _adaptive(
        f, m, b, fm, frm, fb, right, half, depth - 1
    )


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    tol: float | None = None,
    max_depth: int = QUAD_MAX_DEPTH,
    split_points: Sequence[float] = (),
) -> float:
    """Adaptive Simpson quadrature of ``f`` on [a, b].

    Known kink locations should be passed as ``split_points``; the integrand
    is assumed smooth between consecutive splits.  The tolerance defaults to
    the module-level QUAD_TOL, read at call time.
    """
    if tol is None:
        tol = QUAD_TOL
    if b <= a:
        return 0.0
    pts = [a] + sorted(p for p in split_points if a < p < b) + [b]
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi - lo <= 0.0:
            continue
        m = 0.5 * (lo + hi)
        flo, fm, fhi = f(lo), f(m), f(hi)
        whole = _simpson(flo, fm, fhi, hi - lo)
        total += _adaptive(f, lo, hi, flo, fm, fhi, whole, tol, max_depth)
    return total


def expand_bracket_up(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    cap: float,
) -> tuple[float, float, float, float]:
    """Double ``hi`` until f changes sign (f(lo) < 0 <= f(hi)) or ``cap`` is hit.

    Returns (lo, hi, f(lo), f(hi)); the caller must inspect the signs when the
    cap was reached without a sign change.
    """
    flo = f(lo)
    fhi = f(hi)
    while fhi < 0.0 and hi < cap:
        lo, flo = hi, fhi
        hi = min(2.0 * hi, cap)
        fhi = f(hi)
    return lo, hi, flo, fhi
