"""Robust selling mechanisms under Wasserstein distributional ambiguity.

Computes optimal robust-satisficing and robust-optimization screening
mechanisms for a single buyer with valuations on [0, 1], posted-price
variants, buyer-surplus analytics, and out-of-sample evaluation against
arbitrary true valuation distributions.
"""

from .distributions import (
    Beta,
    Empirical,
    Mixture,
    Power,
    ReferenceDistribution,
    TrueDistribution,
    TruncatedExponential,
    Uniform,
    ValuationDistribution,
    from_json,
    max_posted_revenue,
    revenue,
    wasserstein_distance,
)
from .errors import (
    DomainError,
    InfeasibleLevelError,
    InfeasibleTargetError,
    RadiusTooLargeError,
    RobustMechError,
    UnsupportedReferenceError,
)
from .evaluation import (
    CrossingThresholds,
    EvalReport,
    SweepCell,
    SweepConfig,
    ThetaDiagnostic,
    beta_sweep,
    crossing_thresholds,
    eta_ro,
    eta_rs,
    expected_revenue,
    sweep_csv,
    theta_condition,
    theta_sensitivity,
)
from .isorevenue import IsoRevenueCut, cut, gap_only, worst_case_ccdf
from .mechanisms import Mechanism, PostedPrice, PriceStatistics, RandomizedLogMechanism
from .pp_solver import (
    PPSolveReport,
    optimal_price_given_k,
    rho_pp,
    solve_pp,
    solve_pp_two_point,
)
from .ro_solver import (
    ROSolveReport,
    build_ro_mechanism,
    pi_ro_star,
    radius_for_target,
    ro_pp_price,
    ro_pp_price_uniform,
    solve_ro,
    tau_equiv,
)
from .rs_solver import (
    SolveReport,
    fragility_adjusted_revenue,
    pi_star,
    rho_star,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "Beta",
    "Empirical",
    "Mixture",
    "Power",
    "ReferenceDistribution",
    "TrueDistribution",
    "TruncatedExponential",
    "Uniform",
    "ValuationDistribution",
    "from_json",
    "max_posted_revenue",
    "revenue",
    "wasserstein_distance",
    "DomainError",
    "InfeasibleLevelError",
    "InfeasibleTargetError",
    "RadiusTooLargeError",
    "RobustMechError",
    "UnsupportedReferenceError",
    "IsoRevenueCut",
    "cut",
    "gap_only",
    "worst_case_ccdf",
    "Mechanism",
    "PostedPrice",
    "PriceStatistics",
    "RandomizedLogMechanism",
    "SolveReport",
    "fragility_adjusted_revenue",
    "pi_star",
    "rho_star",
    "solve",
    "PPSolveReport",
    "optimal_price_given_k",
    "rho_pp",
    "solve_pp",
    "solve_pp_two_point",
    "ROSolveReport",
    "build_ro_mechanism",
    "pi_ro_star",
    "radius_for_target",
    "ro_pp_price",
    "ro_pp_price_uniform",
    "solve_ro",
    "tau_equiv",
    "CrossingThresholds",
    "EvalReport",
    "SweepCell",
    "SweepConfig",
    "ThetaDiagnostic",
    "beta_sweep",
    "crossing_thresholds",
    "eta_ro",
    "eta_rs",
    "expected_revenue",
    "sweep_csv",
    "theta_condition",
    "theta_sensitivity",
    "__version__",
]
