import numpy as np
import pytest
from pydantic import ValidationError

from lcbounds import stochastic_orders as so
from lcbounds.errors import DomainError
from lcbounds.extremal import majorant_c
from lcbounds.logconcave_gen import (
    DiscretePMF, max_density, mean, render_asym_laplace_c, scaled, shifted, uniform_density,
)
from lcbounds.stochastic_orders import (
    CrossingPattern, OrderClass, Verdict, certify_order, crossing_pattern, empirical_order_check, expectation,
    lagrange_interpolant, sign_product_holds,
)


class TestCrossingPattern:
    """Sign changes of a density difference"""

    def test_uniform_vs_exponential(self, uniform, exp_centered):
        pattern = crossing_pattern(uniform, exp_centered)
        assert pattern.count == 2
        assert pattern.signs == [1, -1, 1]
        # both crossings sit on the jumps of the uniform
        assert pattern.crossings == pytest.approx((-0.5, 0.5), abs=1e-9)

    def test_identical_laws(self, triangle):
        pattern = crossing_pattern(triangle, triangle)
        assert pattern.count == 0 and pattern.initial_sign == 0
        assert pattern.signs == []

    def test_shift_gives_single_crossing(self, uniform):
        pattern = crossing_pattern(uniform, shifted(uniform, 0.25))
        assert pattern.count == 1
        assert pattern.initial_sign == -1 and pattern.final_sign == 1

    def test_pmf_crossing_between_integers(self):
        g1 = DiscretePMF(offset=0, weights=(0.5, 0.5))
        pattern = crossing_pattern(g1, DiscretePMF(offset=0, weights=(0.25, 0.75)))
        assert pattern.crossings == (0.5,)
        assert pattern.initial_sign == -1
        # a zero at n = 1 does not break the run
        assert crossing_pattern(g1, DiscretePMF(offset=1, weights=(0.5, 0.5))).crossings == (1.0,)

    def test_mixed_inputs(self, uniform):
        with pytest.raises(DomainError):
            crossing_pattern(uniform, DiscretePMF(offset=0, weights=(1.0,)))

    def test_model_validation(self):
        with pytest.raises(ValidationError):
            CrossingPattern(crossings=(1.0, 0.0), initial_sign=1)
        with pytest.raises(ValidationError):
            CrossingPattern(crossings=(), initial_sign=2)


class TestCertificates:
    """Crossing-plus-moment certificates of the n-th order"""

    def test_majorant_certified(self, generated):
        for f in generated[:10]:
            lo, hi = f.support
            t = lo + 0.37 * (hi - lo)
            x = render_asym_laplace_c(majorant_c(f, t))
            cert = certify_order(f, x, 2)
            assert cert.verdict == Verdict.CERTIFIED
            assert cert.crossings.count == 2

    def test_shift_certified_first_order(self, generated):
        f = generated[0]
        cert = certify_order(f, shifted(f, 0.5), 1)
        assert cert.verdict == Verdict.CERTIFIED

    def test_identical_certified(self, triangle):
        assert certify_order(triangle, triangle, 3).verdict == Verdict.CERTIFIED

    def test_exponential_vs_uniform_refuted(self, uniform, exp_centered):
        cert = certify_order(exp_centered, uniform, 2)
        assert cert.verdict == Verdict.REFUTED
        assert cert.max_violation > 0.5
        assert cert.witness is not None

    def test_reverse_shift_refuted(self, generated):
        f = generated[1]
        cert = certify_order(shifted(f, 0.5), f, 1)
        assert cert.verdict == Verdict.REFUTED

    def test_discrete_coin_vs_shift(self):
        g1 = DiscretePMF(offset=0, weights=(0.5, 0.5))
        g2 = DiscretePMF(offset=1, weights=(0.5, 0.5))
        assert certify_order(g1, g2, 1).verdict == Verdict.CERTIFIED
        assert certify_order(g2, g1, 1).verdict == Verdict.REFUTED

    def test_order_must_be_positive(self, uniform):
        with pytest.raises(DomainError):
            certify_order(uniform, uniform, 0)


class TestTestBanks:
    """Fixed test-function banks and the empirical order check"""

    @pytest.mark.parametrize('order_class', list(OrderClass))
    def test_banks_are_finite_and_named(self, order_class):
        bank = so.test_bank(order_class, (-1.0, 1.0))
        assert len(bank) > 10
        names = [b.name for b in bank]
        assert len(set(names)) == len(names)

    def test_bank_needs_support(self):
        with pytest.raises(DomainError):
            so.test_bank(OrderClass.CONVEX, (1.0, 1.0))

    def test_for_order(self):
        assert OrderClass.for_order(2) == OrderClass.CONVEX
        with pytest.raises(DomainError):
            OrderClass.for_order(5)

    def test_uniform_convex_below_centered_exponential(self, uniform, exp_centered):
        report = empirical_order_check(uniform, exp_centered, OrderClass.CONVEX)
        assert report.consistent
        reverse = empirical_order_check(exp_centered, uniform, OrderClass.CONVEX)
        assert not reverse.consistent
        assert reverse.max_violation > 0.5

    def test_uniform_below_generated_in_convex_order(self, generated):
        for f in generated:
            unit = scaled(f, max_density(f))
            centered = shifted(unit, -mean(unit))
            assert so.law_mean(centered) == pytest.approx(0.0, abs=1e-12)
            report = empirical_order_check(uniform_density(), centered, OrderClass.CONVEX)
            assert report.consistent

    def test_expectation(self, uniform):
        assert expectation(uniform, lambda x: x ** 2) == pytest.approx(1 / 12, abs=1e-14)
        assert expectation(uniform, lambda x: x, deviation=True) == pytest.approx(0.25, abs=1e-14)


class TestInterpolation:
    """Interpolation modulo polynomials and the sign of the remainder"""

    def test_quartic_interpolant(self):
        coeffs = lagrange_interpolant(lambda x: x ** 4, [-1.0, 0.0, 1.0])
        assert coeffs == pytest.approx([0.0, 0.0, 1.0], abs=1e-14)
        grid = np.linspace(-2, 2, 4001)
        # remainder x^3 (x^2 - 1)^2 changes sign with three nodes
        assert not sign_product_holds(lambda x: x ** 4, [-1.0, 0.0, 1.0], grid)
        assert sign_product_holds(lambda x: x ** 4, [-1.0, 1.0], grid)
        assert sign_product_holds(lambda x: x ** 4, [-1.0, -0.3, 0.2, 1.0], grid)

    def test_exponential_any_nodes(self):
        rng = np.random.default_rng(4)
        grid = np.linspace(-1.5, 1.5, 3001)
        for k in range(1, 5):
            nodes = np.sort(rng.uniform(-1, 1, k))
            assert sign_product_holds(np.exp, nodes, grid)

    def test_hinge_of_matching_degree(self):
        nodes = [-0.8, -0.1, 0.6]
        assert sign_product_holds(lambda x: np.maximum(x - 0.2, 0.0) ** 2, nodes, np.linspace(-2, 2, 4001))

    def test_concave_fails(self):
        assert not sign_product_holds(lambda x: -x ** 2, [-1.0, 1.0], np.linspace(-2, 2, 401))

    def test_bad_nodes(self):
        with pytest.raises(DomainError):
            lagrange_interpolant(np.exp, [])
        with pytest.raises(DomainError):
            lagrange_interpolant(np.exp, [0.5, 0.5])
