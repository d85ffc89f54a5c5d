import math

import numpy as np
import pytest

from robustmech import (
    Beta,
    DomainError,
    Empirical,
    InfeasibleTargetError,
    Mixture,
    optimal_price_given_k,
    rho_pp,
    solve,
    solve_pp,
    solve_pp_two_point,
)

IRREGULAR = Mixture((Beta(10.0, 2.0), Beta(2.0, 10.0)), (0.9, 0.1))


class TestRhoPP:
    def test_zero_price(self, uniform, two_point):
        assert rho_pp(uniform, 0.0, 1.0) == 0.0
        assert rho_pp(two_point, 0.0, 2.0) == 0.0

    def test_two_point_direct_sum(self, two_point):
        # 0.5*min(0.4, 2*(0.3-0.4)^+) + 0.5*min(0.4, 2*0.3)
        assert rho_pp(two_point, 0.4, 2.0) == pytest.approx(0.2, abs=1e-15)

    @pytest.mark.parametrize("k", np.geomspace(0.05, 50.0, 50).tolist())
    def test_uniform_value_at_optimal_price(self, uniform, k):
        p = k / (2.0 * k + 1.0)
        assert rho_pp(uniform, p, k) == pytest.approx(k / (4.0 * k + 2.0), abs=1e-12)

    def test_continuous_matches_pointwise_expectation(self, beta25):
        # independent route: dense-grid expectation of min{p, k (v - p)^+}
        p, k = 0.23, 1.7
        n = 2_000_001
        vs = np.linspace(0.0, 1.0, n)
        integrand = np.minimum(p, k * np.clip(vs - p, 0.0, None))
        cdf = beta25.cdf(vs)
        oracle = float(np.trapezoid(integrand, cdf))
        assert rho_pp(beta25, p, k) == pytest.approx(oracle, abs=1e-6)

    @pytest.mark.parametrize("fixture", ["uniform", "beta25", "two_point"])
    def test_concave_in_price(self, fixture, request):
        dist = request.getfixturevalue(fixture)
        grid = np.linspace(0.0, 1.0, 401)
        vals = np.asarray([rho_pp(dist, float(p), 1.3) for p in grid])
        assert np.min(np.diff(vals, 2)) <= 1e-8

    def test_validation(self, uniform):
        with pytest.raises(DomainError):
            rho_pp(uniform, 1.2, 1.0)
        with pytest.raises(DomainError):
            rho_pp(uniform, 0.5, 0.0)


class TestOptimalPrice:
    @pytest.mark.parametrize("k", [0.2, 0.5, 1.0, 2.0, 10.0])
    def test_uniform_closed_form(self, uniform, k):
        assert optimal_price_given_k(uniform, k) == pytest.approx(
            k / (2.0 * k + 1.0), abs=1e-8
        )

    @pytest.mark.parametrize("k", [0.3, 0.75, 1.33, 5.0])
    def test_two_point_closed_form(self, two_point, k):
        assert optimal_price_given_k(two_point, k) == pytest.approx(
            0.7 * k / (1.0 + k), abs=1e-12
        )

    @pytest.mark.parametrize(
        "fixture,n_grid",
        [("uniform", 100_001), ("two_point", 100_001), ("beta25", 20_001)],
    )
    def test_beats_price_grid(self, fixture, n_grid, request):
        dist = request.getfixturevalue(fixture)
        k = 1.1
        p_opt = optimal_price_given_k(dist, k)
        best = max(
            rho_pp(dist, i / (n_grid - 1), k) for i in range(n_grid)
        )
        assert rho_pp(dist, p_opt, k) >= best - 1e-6

    def test_irregular_mixture_beats_price_grid(self):
        k = 0.9
        p_opt = optimal_price_given_k(IRREGULAR, k)
        grid = np.linspace(0.0, 1.0, 20_001)
        best = max(rho_pp(IRREGULAR, float(p), k) for p in grid)
        assert rho_pp(IRREGULAR, p_opt, k) >= best - 1e-6

    @pytest.mark.parametrize("fixture", ["uniform", "beta25", "exp1"])
    @pytest.mark.parametrize("k", [0.4, 1.0, 3.0])
    def test_first_order_condition(self, fixture, k, request):
        # iso-revenue characterization: both prices yield the same revenue
        dist = request.getfixturevalue(fixture)
        p = optimal_price_given_k(dist, k)
        b = (1.0 + 1.0 / k) * p
        assert b * dist.ccdf(b) == pytest.approx(p * dist.ccdf(p), abs=1e-8)


class TestSolvePP:
    @pytest.mark.parametrize("tau", np.linspace(0.005, 0.24, 50).tolist())
    def test_uniform_closed_form(self, uniform, tau):
        rep = solve_pp(uniform, tau)
        assert rep.k_pp == pytest.approx(2.0 * tau / (1.0 - 4.0 * tau), abs=1e-8)
        assert rep.p_pp == pytest.approx(2.0 * tau, abs=1e-8)

    def test_uniform_known_solutions(self, uniform):
        rep = solve_pp(uniform, 0.1)
        assert rep.k_pp == pytest.approx(1.0 / 3.0, abs=0.005)
        assert rep.p_pp == pytest.approx(0.2, abs=0.005)
        rep = solve_pp(uniform, 0.2)
        assert rep.k_pp == pytest.approx(2.0, abs=0.005)
        assert rep.p_pp == pytest.approx(0.4, abs=1e-6)

    def test_rho_at_solution_hits_target(self, uniform, two_point, beta25):
        for dist, tau in ((uniform, 0.22), (two_point, 0.12), (beta25, 0.07)):
            rep = solve_pp(dist, tau)
            assert rep.rho_at_solution == pytest.approx(tau, abs=1e-8)

    def test_infeasible(self, uniform, two_point):
        with pytest.raises(InfeasibleTargetError):
            solve_pp(uniform, 0.26)
        with pytest.raises(InfeasibleTargetError):
            solve_pp(two_point, 0.35)

    def test_rho_star_increasing_in_k(self, uniform, two_point):
        for dist in (uniform, two_point):
            ks = np.geomspace(0.05, 30.0, 20)
            vals = [
                rho_pp(dist, optimal_price_given_k(dist, float(k)), float(k))
                for k in ks
            ]
            assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_fragility_dominates_optimal_mechanism(self, uniform, two_point, beta25):
        # the optimal menu minimizes fragility over a superset of posted prices
        for dist, tau in ((uniform, 0.1), (uniform, 0.2), (two_point, 0.18),
                          (beta25, 0.08)):
            assert solve_pp(dist, tau).k_pp >= solve(dist, tau).k_star - 1e-9


class TestTwoPointClosedForm:
    def test_high_target_branch(self):
        rep = solve_pp_two_point(0.3, 0.5, 0.7, 0.5, 0.2)
        assert rep.k_pp == pytest.approx(0.2 / 0.15, abs=1e-12)
        assert rep.p_pp == pytest.approx(0.4, abs=1e-12)

    def test_low_target_branch(self):
        rep = solve_pp_two_point(0.3, 0.5, 0.7, 0.5, 0.1)
        expected_k = (0.4 - math.sqrt(0.16 - 0.08)) / 0.4
        assert rep.k_pp == pytest.approx(expected_k, abs=1e-12)
        assert rep.p_pp == pytest.approx(0.7 * expected_k / (1 + expected_k), abs=1e-12)

    @pytest.mark.parametrize(
        "v1,a1,v2,tau",
        [
            (0.3, 0.5, 0.7, 0.1),
            (0.3, 0.5, 0.7, 0.2),
            (0.2, 0.3, 0.9, 0.15),
            (0.5, 0.4, 0.6, 0.3),   # v1 > (1-a1)v2 branch
            (0.5, 0.4, 0.6, 0.45),
            (0.25, 0.7, 0.8, 0.2),
        ],
    )
    def test_matches_generic_solver(self, v1, a1, v2, tau):
        closed = solve_pp_two_point(v1, a1, v2, 1.0 - a1, tau)
        generic = solve_pp(Empirical(((v1, a1), (v2, 1.0 - a1))), tau)
        assert closed.k_pp == pytest.approx(generic.k_pp, abs=1e-6)
        assert closed.p_pp == pytest.approx(generic.p_pp, abs=1e-6)

    def test_branch_boundary_warning(self):
        rep = solve_pp_two_point(0.3, 0.5, 0.7, 0.5, 0.15)
        assert rep.warnings

    def test_validation(self):
        with pytest.raises(DomainError):
            solve_pp_two_point(0.7, 0.5, 0.3, 0.5, 0.1)
        with pytest.raises(InfeasibleTargetError):
            solve_pp_two_point(0.3, 0.5, 0.7, 0.5, 0.36)
