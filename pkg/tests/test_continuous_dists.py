import numpy as np
import pytest

from lcbounds.continuous_dists import (
    AsymLaplaceC, Interval, cdf, central_abs_moment, interval_overlap, make_asym_laplace, mean_var,
    mean_zero_family, mgf, pdf, superlevel_set, tail_superlevel_measure,
)
from lcbounds.errors import DomainError, ParameterRangeError


class TestAsymLaplaceC:
    """Closed forms of the continuous asymmetric Laplace law"""

    def test_pdf_examples(self):
        d = AsymLaplaceC(lambda1=1.0, lambda2=1.0)
        assert pdf(d, 0.0) == pytest.approx(0.5, abs=1e-15)
        assert pdf(d, 1.0) == pytest.approx(0.5 * np.exp(-1), abs=1e-15)
        assert pdf(d, -2.0) == pytest.approx(0.5 * np.exp(-2), abs=1e-15)

    def test_one_sided_exponential(self):
        d = AsymLaplaceC(lambda1=0.0, lambda2=1.0)
        assert pdf(d, -0.1) == 0.0
        assert pdf(d, 0.0) == pytest.approx(1.0)
        assert pdf(d, 2.0) == pytest.approx(np.exp(-2.0))
        assert d.max_density == 1.0

    def test_pdf_vectorised(self):
        d = AsymLaplaceC(lambda1=0.5, lambda2=2.0, mode=1.0)
        x = np.array([-1.0, 1.0, 3.0])
        out = pdf(d, x)
        assert isinstance(out, np.ndarray)
        assert out[1] == pytest.approx(1 / 2.5)

    def test_cdf_at_mode(self):
        d = AsymLaplaceC(lambda1=1.0, lambda2=3.0, mode=-2.0)
        assert cdf(d, -2.0) == pytest.approx(0.25)
        assert cdf(d, 1e6) == pytest.approx(1.0)
        assert cdf(d, -1e6) == pytest.approx(0.0)

    def test_mgf_examples(self):
        assert mgf(AsymLaplaceC(lambda1=1.0, lambda2=1.0), 0.5) == pytest.approx(4 / 3, abs=1e-15)
        assert mgf(AsymLaplaceC(lambda1=0.0, lambda2=1.0), 0.5) == pytest.approx(2.0, abs=1e-15)

    def test_mgf_outside_domain(self):
        with pytest.raises(DomainError):
            mgf(AsymLaplaceC(lambda1=1.0, lambda2=1.0), 1.0)
        with pytest.raises(DomainError):
            mgf(AsymLaplaceC(lambda1=0.5, lambda2=1.0), -2.0)

    def test_mgf_second_derivative_gives_second_moment(self):
        d = AsymLaplaceC(lambda1=1.0, lambda2=2.0, mode=0.3)
        mu, var = mean_var(d)
        h = 1e-4
        second = (mgf(d, h) - 2 * mgf(d, 0.0) + mgf(d, -h)) / h ** 2
        assert second == pytest.approx(var + mu ** 2, rel=1e-5)

    def test_mean_var(self):
        assert mean_var(AsymLaplaceC(lambda1=1.0, lambda2=2.0)) == pytest.approx((1.0, 5.0))
        assert mean_var(AsymLaplaceC(lambda1=0.0, lambda2=1.0, mode=-1.0)) == pytest.approx((0.0, 1.0))

    def test_central_abs_moment_matches_variance(self):
        d = AsymLaplaceC(lambda1=0.7, lambda2=1.3, mode=0.2)
        assert central_abs_moment(d, 2) == pytest.approx(mean_var(d)[1], rel=1e-7)

    def test_central_abs_moment_exponential(self):
        # E|Z - 1| = 2/e for Z ~ Exp(1)
        assert central_abs_moment(AsymLaplaceC(lambda1=0.0, lambda2=1.0), 1) == pytest.approx(2 / np.e, rel=1e-8)

    def test_invalid_scales(self):
        with pytest.raises(ParameterRangeError):
            make_asym_laplace(-1.0, 1.0)
        with pytest.raises(ParameterRangeError):
            make_asym_laplace(0.0, 0.0)


class TestSuperlevelSets:
    """Superlevel intervals and their overlap with centred windows"""

    def test_superlevel_measure_independent_of_split(self):
        M, t = 0.5, 0.1
        for l1 in (0.0, 0.5, 1.3, 2.0):
            s = superlevel_set(AsymLaplaceC(lambda1=l1, lambda2=2.0 - l1), t)
            assert s.measure == pytest.approx(np.log(M / t) / M)

    def test_superlevel_level_out_of_range(self):
        d = AsymLaplaceC(lambda1=1.0, lambda2=1.0)
        with pytest.raises(DomainError):
            superlevel_set(d, 0.5)
        with pytest.raises(DomainError):
            superlevel_set(d, 0.0)

    def test_interval_model(self):
        s = Interval(lo=-1.0, hi=3.0)
        assert s.measure == 4.0 and s.center == 1.0
        with pytest.raises(ValueError):
            Interval(lo=1.0, hi=0.0)

    def test_overlap_cases(self):
        assert interval_overlap(1.0, 0.5, 0.2) == pytest.approx(1.0)
        assert interval_overlap(1.0, 1.0, 0.5) == pytest.approx(1.5)
        assert interval_overlap(1.0, 1.0, 3.0) == 0.0
        assert interval_overlap(0.5, 2.0, -1.0) == pytest.approx(1.0)

    def test_overlap_against_direct_formula(self):
        rng = np.random.default_rng(3)
        a, b = rng.uniform(0, 3, 200), rng.uniform(0, 3, 200)
        x = rng.uniform(-7, 7, 200)
        direct = np.maximum(0.0, np.minimum(a, x + b) - np.maximum(-a, x - b))
        assert np.allclose(interval_overlap(a, b, x), direct, atol=1e-12)

    def test_overlap_nonincreasing_in_distance(self):
        x = np.linspace(0, 5, 501)
        values = interval_overlap(1.2, 0.7, x)
        assert np.all(np.diff(values) <= 1e-15)

    def test_tail_superlevel_exponential_example(self):
        d = mean_zero_family(1.0, 1.0)
        assert d.lambda1 == 0.0 and d.mode == pytest.approx(-1.0)
        assert tail_superlevel_measure(d, 0.5, np.exp(-2)) == pytest.approx(1.0, abs=1e-12)

    def test_tail_superlevel_against_grid_scan(self):
        for l2 in (0.0, 0.3, 0.5, 0.9):
            d = mean_zero_family(1.0, l2)
            a, t = 0.4, 0.3
            x = np.linspace(-40, 40, 800_001)
            dx = x[1] - x[0]
            scan = np.sum((pdf(d, x) > t) & (np.abs(x) > a)) * dx
            assert tail_superlevel_measure(d, a, t) == pytest.approx(scan, abs=1e-3)

    def test_tail_superlevel_needs_mean_zero(self):
        with pytest.raises(DomainError):
            tail_superlevel_measure(AsymLaplaceC(lambda1=0.0, lambda2=1.0), 0.5, 0.1)


class TestMeanZeroFamily:
    """Mean-zero asymmetric Laplace laws of fixed maximum"""

    @pytest.mark.parametrize('lambda2', [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_mean_and_max(self, lambda2):
        d = mean_zero_family(1.0, lambda2)
        assert mean_var(d)[0] == pytest.approx(0.0, abs=1e-15)
        assert d.max_density == pytest.approx(1.0)

    def test_tail_measure_extremes(self):
        grid = np.linspace(0.0, 1.0, 101)
        for a in (0.1, 0.5, 2.0):
            for t in (0.05, 0.5, 0.9):
                m = np.array([tail_superlevel_measure(mean_zero_family(1.0, l2), a, t) for l2 in grid])
                assert m[50] <= m.min() + 1e-12
                assert m.max() <= max(m[0], m[-1]) + 1e-12

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            mean_zero_family(1.0, 1.5)
        with pytest.raises(DomainError):
            mean_zero_family(0.0, 0.5)
