import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import sorted_quantile_transport, trapezoid_ccdf_distance
from robustmech import (
    Beta,
    DomainError,
    Empirical,
    Mixture,
    Power,
    TruncatedExponential,
    Uniform,
    from_json,
    max_posted_revenue,
    revenue,
    wasserstein_distance,
)
from robustmech.numerics import adaptive_simpson

ALL_KINDS = [
    Uniform(),
    Power(2.0),
    TruncatedExponential(1.0),
    Beta(2.0, 5.0),
    Beta(0.5, 0.5),
    Mixture((Beta(10.0, 2.0), Beta(2.0, 10.0)), (0.9, 0.1)),
    Empirical(((0.3, 0.5), (0.7, 0.5))),
]


class TestCcdf:
    def test_uniform_point(self, uniform):
        assert uniform.ccdf(0.3) == pytest.approx(0.7)

    def test_empirical_strictly_above(self, two_point):
        assert two_point.ccdf(0.3) == pytest.approx(0.5)
        assert two_point.ccdf(0.29) == pytest.approx(1.0)
        assert two_point.ccdf(0.7) == pytest.approx(0.0)

    def test_beta_symmetric_midpoint(self):
        assert Beta(2.0, 2.0).ccdf(0.5) == pytest.approx(0.5, abs=1e-12)

    def test_domain_error(self, uniform):
        with pytest.raises(DomainError):
            uniform.ccdf(1.5)

    @pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.to_json()["kind"])
    def test_nonincreasing_and_bounded(self, dist):
        xs = np.linspace(0.0, 1.0, 2001)
        vals = dist.ccdf(xs)
        assert np.all(np.diff(vals) <= 1e-12)
        assert np.all(vals >= -1e-12) and np.all(vals <= 1.0 + 1e-12)
        assert dist.ccdf(1.0) == pytest.approx(0.0, abs=1e-12)


class TestCcdfLeft:
    def test_atom_included(self, two_point):
        assert two_point.ccdf_left(0.7) == pytest.approx(0.5)
        assert two_point.ccdf_left(0.71) == pytest.approx(0.0)

    def test_continuous_equals_ccdf(self, uniform):
        assert uniform.ccdf_left(0.4) == pytest.approx(0.6)

    def test_zero_excluded(self, uniform):
        with pytest.raises(DomainError):
            uniform.ccdf_left(0.0)

    @pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.to_json()["kind"])
    def test_left_limit_dominates(self, dist):
        xs = np.linspace(0.01, 1.0, 500)
        assert np.all(dist.ccdf_left(xs) >= dist.ccdf(xs) - 1e-12)


class TestMean:
    def test_uniform(self, uniform):
        assert uniform.mean() == pytest.approx(0.5)

    def test_two_point(self, two_point):
        assert two_point.mean() == pytest.approx(0.5)

    def test_power_one_matches_uniform(self):
        assert Power(1.0).mean() == pytest.approx(0.5)

    @pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.to_json()["kind"])
    def test_matches_ccdf_quadrature(self, dist):
        # independent route: adaptive Simpson of the CCDF over [0, 1]
        numeric = adaptive_simpson(
            lambda x: dist.ccdf(x), 0.0, 1.0, split_points=dist.kink_points()
        )
        assert dist.mean() == pytest.approx(numeric, abs=1e-8)
        assert 0.0 < dist.mean() <= 1.0


class TestCcdfIntegral:
    @pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.to_json()["kind"])
    @pytest.mark.parametrize("bounds", [(0.0, 1.0), (0.1, 0.6), (0.35, 0.9)])
    def test_matches_quadrature(self, dist, bounds):
        a, b = bounds
        numeric = adaptive_simpson(
            lambda x: dist.ccdf(x), a, b, split_points=dist.kink_points()
        )
        assert dist.ccdf_integral(a, b) == pytest.approx(numeric, abs=1e-9)

    def test_empty_range(self, uniform):
        assert uniform.ccdf_integral(0.5, 0.5) == 0.0
        assert uniform.ccdf_integral(0.6, 0.4) == 0.0


class TestRevenue:
    def test_uniform(self, uniform):
        assert revenue(uniform, 0.5) == pytest.approx(0.25)

    def test_two_point_upper_atom(self, two_point):
        assert revenue(two_point, 0.7) == pytest.approx(0.35)

    def test_zero_price(self, two_point, uniform):
        assert revenue(two_point, 0.0) == 0.0
        assert revenue(uniform, 0.0) == 0.0


class TestMaxPostedRevenue:
    def test_uniform(self, uniform):
        pi0, p = max_posted_revenue(uniform)
        assert pi0 == pytest.approx(0.25, abs=1e-10)
        assert p == pytest.approx(0.5, abs=1e-6)

    def test_two_point(self, two_point):
        assert max_posted_revenue(two_point) == (pytest.approx(0.35), pytest.approx(0.7))

    @given(
        v1=st.floats(0.05, 0.6),
        dv=st.floats(0.05, 0.39),
        a1=st.floats(0.05, 0.95),
    )
    @settings(max_examples=50, deadline=None)
    def test_two_point_closed_form(self, v1, dv, a1):
        v2 = min(v1 + dv, 1.0)
        dist = Empirical(((v1, a1), (v2, 1.0 - a1)))
        pi0, _ = max_posted_revenue.__wrapped__(dist)
        assert pi0 == pytest.approx(max(v1, (1.0 - a1) * v2), abs=1e-12)

    @pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.to_json()["kind"])
    def test_beats_random_prices(self, dist):
        pi0, _ = max_posted_revenue(dist)
        rng = np.random.default_rng(0)
        prices = rng.random(1000)
        assert all(revenue(dist, float(p)) <= pi0 + 1e-9 for p in prices)


class TestQuantile:
    @pytest.mark.parametrize(
        "dist",
        [Uniform(), Power(2.0), TruncatedExponential(1.5), Beta(2.0, 5.0),
         Mixture((Beta(10.0, 2.0), Beta(2.0, 10.0)), (0.9, 0.1))],
        ids=["uniform", "power", "exp", "beta", "mixture"],
    )
    def test_inverse_of_cdf(self, dist):
        us = np.linspace(0.001, 0.999, 97)
        xs = dist.quantile(us)
        assert np.max(np.abs(dist.cdf(xs) - us)) < 1e-10

    def test_empirical_steps(self, two_point):
        assert two_point.quantile(0.2) == pytest.approx(0.3)
        assert two_point.quantile(0.6) == pytest.approx(0.7)
        assert two_point.quantile(1.0) == pytest.approx(0.7)

    def test_sampling_is_seeded(self, beta25):
        a = beta25.sample(100, np.random.default_rng(7))
        b = beta25.sample(100, np.random.default_rng(7))
        assert np.array_equal(a, b)


class TestEmpiricalConstruction:
    def test_deduplicates_and_sorts(self):
        d = Empirical(((0.7, 0.25), (0.3, 0.5), (0.7, 0.25)))
        assert d.atoms == ((0.3, 0.5), (0.7, 0.5))

    def test_atom_jump_matches_mass(self, two_point):
        for v, m in two_point.atoms:
            assert two_point.ccdf_left(v) - two_point.ccdf(v) == pytest.approx(m)

    def test_rejects_bad_masses(self):
        with pytest.raises(DomainError):
            Empirical(((0.3, 0.5), (0.7, 0.6)))
        with pytest.raises(DomainError):
            Empirical(((0.3, -0.5), (0.7, 1.5)))


def _build_empirical(values, raws):
    raws = raws[: len(values)]
    total = sum(raws)
    return Empirical(tuple((v, r / total) for v, r in zip(values, raws)))


empirical_strategy = st.builds(
    _build_empirical,
    values=st.lists(
        st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=6, unique=True
    ),
    raws=st.lists(st.floats(0.05, 1.0), min_size=6, max_size=6),
)


class TestWasserstein:
    def test_identity(self, uniform, two_point, beta25):
        for d in (uniform, two_point, beta25):
            assert wasserstein_distance(d, d) == pytest.approx(0.0, abs=1e-12)

    def test_dirac_at_zero_vs_uniform(self, uniform):
        dirac0 = Empirical(((0.0, 1.0),))
        assert wasserstein_distance(dirac0, uniform) == pytest.approx(0.5, abs=1e-12)

    def test_two_diracs_sorted_quantile_oracle(self):
        a = Empirical(((0.3, 1.0),))
        b = Empirical(((0.7, 1.0),))
        assert wasserstein_distance(a, b) == pytest.approx(0.4, abs=1e-14)
        assert sorted_quantile_transport(a, b) == pytest.approx(0.4, abs=1e-14)

    @given(p=empirical_strategy, q=empirical_strategy)
    @settings(max_examples=60, deadline=None)
    def test_matches_transport_oracle(self, p, q):
        assert wasserstein_distance(p, q) == pytest.approx(
            sorted_quantile_transport(p, q), abs=1e-10
        )

    @given(p=empirical_strategy, q=empirical_strategy, r=empirical_strategy)
    @settings(max_examples=30, deadline=None)
    def test_metric_axioms(self, p, q, r):
        dpq = wasserstein_distance(p, q)
        assert dpq >= 0.0
        assert dpq == pytest.approx(wasserstein_distance(q, p), abs=1e-12)
        assert dpq <= (
            wasserstein_distance(p, r) + wasserstein_distance(r, q) + 1e-10
        )

    def test_continuous_pair_against_dense_grid(self, uniform, beta25):
        oracle = trapezoid_ccdf_distance(beta25.ccdf, uniform.ccdf)
        assert wasserstein_distance(beta25, uniform) == pytest.approx(
            oracle, abs=1e-6
        )

    def test_discrete_vs_continuous(self, uniform, two_point):
        oracle = trapezoid_ccdf_distance(two_point.ccdf, uniform.ccdf)
        assert wasserstein_distance(two_point, uniform) == pytest.approx(
            oracle, abs=1e-6
        )


class TestJson:
    @pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.to_json()["kind"])
    def test_round_trip(self, dist):
        clone = from_json(json.dumps(dist.to_json()))
        assert clone == dist

    def test_parse_inline(self):
        d = from_json('{"kind":"empirical","atoms":[[0.3,0.5],[0.7,0.5]]}')
        assert isinstance(d, Empirical)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            from_json('{"kind":"cauchy"}')

    def test_missing_field(self):
        with pytest.raises(DomainError):
            from_json('{"kind":"power"}')


class TestValidation:
    def test_power_requires_alpha_ge_one(self):
        with pytest.raises(DomainError):
            Power(0.5)

    def test_beta_requires_positive_shapes(self):
        with pytest.raises(DomainError):
            Beta(0.0, 1.0)

    def test_mixture_weights(self):
        with pytest.raises(DomainError):
            Mixture((Uniform(), Uniform()), (0.6, 0.6))

    def test_mixture_rejects_discrete_components(self):
        with pytest.raises(DomainError):
            Mixture((Empirical(((0.5, 1.0),)),), (1.0,))

    def test_exponential_rate(self):
        with pytest.raises(DomainError):
            TruncatedExponential(0.0)
