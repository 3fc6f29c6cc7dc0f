import math

import numpy as np
import pytest
from pydantic import ValidationError

from lcbounds.errors import DivergenceError, DomainError, SubfactorialOverflowError
from lcbounds.logconcave_gen import DiscretePMF, max_density, moments_c, scaled, uniform_density
from lcbounds.moments_orlicz import (
    YoungFunction, acm_bounds, exp_young, gamma_fn, orlicz_norm, parse_young, power_young, sandwich_bounds,
    subfactorial, subfactorial_integral,
)


class TestYoungFunctions:
    """Validation and parsing of Young functions"""

    def test_builtin(self):
        assert power_young(2.0)(np.array([3.0]))[0] == pytest.approx(9.0)
        assert exp_young()(np.array([1.0]))[0] == pytest.approx(np.e - 1)

    def test_concave_rejected(self):
        with pytest.raises(ValidationError):
            YoungFunction(descriptor='sqrt', evaluate=np.sqrt)

    def test_nonzero_at_origin_rejected(self):
        with pytest.raises(ValidationError):
            YoungFunction(descriptor='shifted', evaluate=lambda x: x + 1.0)

    def test_power_below_one(self):
        with pytest.raises(DomainError):
            power_young(0.5)

    def test_parse(self):
        assert parse_young('p=2').descriptor == 'p=2'
        assert parse_young(' exp ').descriptor == 'exp'
        with pytest.raises(DomainError):
            parse_young('q=2')
        with pytest.raises(DomainError):
            parse_young('p=abc')


class TestOrliczNorm:
    """Bisection for the Luxemburg norm"""

    def test_point_mass_is_zero(self):
        assert orlicz_norm(DiscretePMF(offset=0, weights=(1.0,)), power_young(2)) == 0.0
        assert orlicz_norm(DiscretePMF(offset=4, weights=(1.0,)), exp_young(), center=True) == 0.0

    def test_power_norm_is_moment(self, generated):
        for f in generated[:10]:
            for p in (1.0, 2.0, 3.0):
                sigma = moments_c(f, p)[2]
                assert orlicz_norm(f, power_young(p), center=True) == pytest.approx(sigma ** (1 / p), abs=1e-6)

    def test_centered_exponential_psi1(self, exp_centered):
        assert orlicz_norm(exp_centered, power_young(1)) == pytest.approx(2 / np.e, abs=1e-7)

    def test_discrete_fair_coin(self):
        coin = DiscretePMF(offset=0, weights=(0.5, 0.5))
        assert orlicz_norm(coin, power_young(2), center=True) == pytest.approx(0.5, abs=1e-9)
        assert orlicz_norm(coin, power_young(2)) == pytest.approx(math.sqrt(0.5), abs=1e-9)

    def test_homogeneity(self, generated):
        f = generated[3]
        base = orlicz_norm(f, exp_young(), center=True)
        assert orlicz_norm(scaled(f, 2.5), exp_young(), center=True) == pytest.approx(2.5 * base, rel=1e-8)

    def test_divergence(self):
        # jumps at the origin, so it bypasses validation
        wild = YoungFunction.model_construct(descriptor='jump', evaluate=lambda x: np.where(x > 0, 2.0, 0.0) + x)
        with pytest.raises(DivergenceError):
            orlicz_norm(DiscretePMF(offset=0, weights=(0.5, 0.5)), wild)
        with pytest.raises(DivergenceError):
            orlicz_norm(DiscretePMF(offset=0, weights=(0.5, 0.5)), wild, center=True)

    def test_large_scale_needs_many_doublings(self, generated):
        f = generated[2]
        wide = scaled(f, 1e3)
        assert orlicz_norm(wide, exp_young(), center=True) == pytest.approx(
            1e3 * orlicz_norm(f, exp_young(), center=True), rel=1e-8)
        sigma4 = moments_c(wide, 4)[2]
        assert orlicz_norm(wide, power_young(4), center=True) == pytest.approx(sigma4 ** 0.25, rel=1e-6)


class TestSandwich:
    """Uniform and exponential endpoints of the Orlicz sandwich"""

    @pytest.mark.parametrize('p', [1.0, 1.5, 2.0, 3.0, 4.0])
    def test_endpoints_match_acm_constants(self, p):
        lower, upper = sandwich_bounds(1.0, power_young(p))
        acm_lower, acm_upper = acm_bounds(p)
        assert lower == pytest.approx(acm_lower ** (1 / p), abs=1e-7)
        assert upper == pytest.approx(acm_upper ** (1 / p), abs=1e-7)

    def test_scales_with_maximum(self):
        lower1, upper1 = sandwich_bounds(1.0, exp_young())
        lower4, upper4 = sandwich_bounds(4.0, exp_young())
        assert lower4 == pytest.approx(lower1 / 4, rel=1e-8)
        assert upper4 == pytest.approx(upper1 / 4, rel=1e-8)

    def test_generated_inside(self, generated):
        for f in generated[:10]:
            unit = scaled(f, max_density(f))
            for psi in (power_young(2), exp_young()):
                lower, upper = sandwich_bounds(1.0, psi)
                norm = orlicz_norm(unit, psi, center=True)
                assert lower - 1e-7 <= norm <= upper + 1e-7

    def test_invalid_maximum(self):
        with pytest.raises(DomainError):
            sandwich_bounds(0.0, power_young(2))


class TestSubfactorials:
    """Derangement counts, their integral form and the ACM constants"""

    def test_examples(self):
        assert [subfactorial(n) for n in range(7)] == [1, 0, 1, 2, 9, 44, 265]

    def test_overflow_and_domain(self):
        assert subfactorial(20) == 895014631192902121
        with pytest.raises(SubfactorialOverflowError):
            subfactorial(21)
        with pytest.raises(DomainError):
            subfactorial(-1)

    @pytest.mark.parametrize('n', range(13))
    def test_integral_form(self, n):
        exact = subfactorial(n)
        assert subfactorial_integral(n) == pytest.approx(exact, abs=1e-9 * max(1, exact))

    def test_gamma(self):
        assert gamma_fn(5) == 24.0
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi))

    def test_acm_examples(self):
        assert acm_bounds(2) == (pytest.approx(1 / 12, abs=1e-15), 1.0)
        assert acm_bounds(4) == (pytest.approx(1 / 80, abs=1e-15), 9.0)
        lower3, upper3 = acm_bounds(3)
        assert lower3 == pytest.approx(1 / 32)
        assert upper3 == pytest.approx(12 / np.e - 2, abs=1e-10)
        lower1, upper1 = acm_bounds(1)
        assert upper1 == pytest.approx(2 / np.e, abs=1e-10)

    def test_acm_bounds_ordered(self):
        for p in np.linspace(1.0, 8.0, 15):
            lower, upper = acm_bounds(float(p))
            assert 0 < lower < upper

    def test_acm_domain(self):
        with pytest.raises(DomainError):
            acm_bounds(0.5)

    def test_uniform_attains_lower(self):
        u = uniform_density(0.0, 2.0)
        for p in (1, 2, 3, 4):
            value = max_density(u) ** p * moments_c(u, p)[2]
            assert value == pytest.approx(acm_bounds(p)[0], abs=1e-12)
