import numpy as np
import pytest

from lcbounds.discrete_dists import (
    AsymLaplaceD, from_max_and_q, is_asym_laplace_d, make_asym_laplace_d, mean_var_d, mgf_d, pmf,
    sigma4_closed, sigma4_derivative, sigma4_series, solve_pq, support_arrays, truncation_length,
    variance_reparam,
)
from lcbounds.errors import DomainError, ParameterRangeError
from lcbounds.logconcave_gen import DiscretePMF, render_asym_laplace_d


class TestAsymLaplaceD:
    """Closed forms of the discrete asymmetric Laplace law"""

    def test_pmf_examples(self):
        d = AsymLaplaceD(p=1 / 3, q=1 / 2)
        assert d.normalizer == pytest.approx(0.4, abs=1e-15)
        assert pmf(d, 0) == pytest.approx(0.4, abs=1e-15)
        assert pmf(d, -1) == pytest.approx(0.4 / 3, abs=1e-15)
        assert pmf(d, 2) == pytest.approx(0.1, abs=1e-15)

    def test_geometric(self):
        d = AsymLaplaceD(p=0.0, q=0.5, mode=3)
        assert pmf(d, 2) == 0.0
        assert pmf(d, 3) == pytest.approx(0.5)
        assert mean_var_d(d) == pytest.approx((4.0, 2.0))
        assert mean_var_d(AsymLaplaceD(p=1 / 3, q=1 / 2)) == pytest.approx((0.5, 2.75), abs=1e-14)

    def test_series_sums_to_one(self):
        d = AsymLaplaceD(p=0.7, q=0.2, mode=-4)
        n, w = support_arrays(d)
        assert n[0] < -4 < n[-1]
        assert w.sum() == pytest.approx(1.0, abs=1e-14)

    def test_mean_var_against_series(self):
        d = AsymLaplaceD(p=0.6, q=0.3, mode=1)
        n, w = support_arrays(d)
        mu, var = mean_var_d(d)
        assert np.sum(n * w) == pytest.approx(mu, abs=1e-12)
        assert np.sum((n - mu) ** 2 * w) == pytest.approx(var, abs=1e-12)

    def test_mgf(self):
        d = AsymLaplaceD(p=0.5, q=0.5)
        n, w = support_arrays(d)
        assert mgf_d(d, 0.1) == pytest.approx(np.sum(np.exp(0.1 * n) * w), rel=1e-12)
        with pytest.raises(DomainError):
            mgf_d(d, 1.0)

    def test_invalid_ratios(self):
        with pytest.raises(ParameterRangeError):
            make_asym_laplace_d(1.0, 0.2)
        with pytest.raises(ParameterRangeError):
            make_asym_laplace_d(0.2, -0.1)


class TestSolvePQ:
    """Recovering the ratios from the mass at the mode and the mean"""

    def test_two_point_example(self):
        p, q = solve_pq(0.5, 0.5)
        assert p == pytest.approx(0.2, abs=1e-15)
        assert q == pytest.approx(3 / 7, abs=1e-15)

    def test_point_mass(self):
        assert solve_pq(1.0, 0.0) == pytest.approx((0.0, 0.0))

    def test_round_trip(self):
        rng = np.random.default_rng(11)
        for p, q in rng.uniform(0.0, 0.95, (200, 2)):
            d = AsymLaplaceD(p=p, q=q)
            p2, q2 = solve_pq(d.normalizer, mean_var_d(d)[0])
            assert p2 == pytest.approx(p, abs=1e-10)
            assert q2 == pytest.approx(q, abs=1e-10)

    def test_out_of_range(self):
        with pytest.raises(ParameterRangeError):
            solve_pq(0.0, 0.0)
        with pytest.raises(ParameterRangeError):
            solve_pq(0.9, 3.0)


class TestFixedMaximumFamily:
    """Variance and fourth moment as functions of q at fixed maximum"""

    def test_variance_reparam_example(self):
        assert variance_reparam(0.5, 1 / 3) == pytest.approx(1.5, abs=1e-13)
        assert mean_var_d(AsymLaplaceD(p=1 / 3, q=1 / 3))[1] == pytest.approx(1.5, abs=1e-13)

    def test_from_max_and_q(self):
        d = from_max_and_q(0.5, 1 / 3)
        assert d.p == pytest.approx(1 / 3) and d.max_density == pytest.approx(0.5)
        assert from_max_and_q(0.4, 0.0).p == pytest.approx(0.6)

    def test_sigma4_closed_example(self):
        assert sigma4_closed(0.5, 0.0) == pytest.approx(38.0, abs=1e-12)
        assert sigma4_series(AsymLaplaceD(p=0.0, q=0.5)) == pytest.approx(38.0, abs=1e-9)

    def test_sigma4_closed_against_series(self):
        for M in np.linspace(0.1, 0.9, 9):
            for q in np.linspace(0.0, (1 - M) / (1 + M), 7):
                series = sigma4_series(from_max_and_q(M, q))
                assert sigma4_closed(M, q) == pytest.approx(series, abs=1e-9 * max(1.0, series))

    def test_sigma4_derivative_sign_and_root(self):
        assert sigma4_derivative(0.5, 0.0) < 0
        assert sigma4_derivative(0.5, 1 / 3) == pytest.approx(0.0, abs=1e-10)

    def test_sigma4_derivative_against_central_difference(self):
        h = 1e-6
        for M in (0.2, 0.5, 0.8):
            for q in np.linspace(0.01, (1 - M) / (1 + M) - 0.01, 5):
                central = (sigma4_closed(M, q + h) - sigma4_closed(M, q - h)) / (2 * h)
                scale = 36.0 / (M ** 3 * (1 - q) ** 2)
                assert abs(sigma4_derivative(M, q) - central) <= 1e-6 * scale

    def test_geometric_attains_bounds(self):
        for M in (0.1, 0.5, 0.9):
            assert M ** 2 * variance_reparam(M, 0.0) + M == pytest.approx(1.0, abs=1e-14)
            assert M ** 4 * sigma4_closed(M, 0.0) + M * (M ** 2 - 10 * M + 18) == pytest.approx(9.0, abs=1e-12)

    def test_q_out_of_range(self):
        with pytest.raises(ParameterRangeError):
            variance_reparam(0.5, 0.5)
        with pytest.raises(ParameterRangeError):
            sigma4_closed(1.5, 0.0)


class TestTruncation:
    """Series truncation and family membership"""

    def test_truncation_length_meets_tolerance(self):
        for r in (0.1, 0.5, 0.9, 0.99):
            k = truncation_length(r)
            assert r ** k * k ** 4 / (1 - r) < 1e-15
            assert truncation_length(r, weight_power=0.0) <= k

    def test_zero_ratio(self):
        assert truncation_length(0.0) == 0

    def test_is_asym_laplace_d(self):
        g = render_asym_laplace_d(AsymLaplaceD(p=0.4, q=0.6, mode=2))
        assert is_asym_laplace_d(g, 2)
        assert not is_asym_laplace_d(g, 3)
        assert is_asym_laplace_d(DiscretePMF(offset=5, weights=(1.0,)), 5)
        assert not is_asym_laplace_d(DiscretePMF(offset=0, weights=(0.2, 0.5, 0.3)), 1)
