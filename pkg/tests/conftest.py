import pytest

from lcbounds.continuous_dists import AsymLaplaceC
from lcbounds.logconcave_gen import (
    GridDensity, exponential_density, gen_logconcave_c, normalize, render_asym_laplace_c, uniform_density,
)


@pytest.fixture
def uniform():
    """Uniform on [-1/2, 1/2], maximal density 1"""
    return uniform_density(-0.5, 0.5)


@pytest.fixture
def exp_centered():
    """Exp(1) shifted to mean zero: e^{-(x+1)} on x > -1"""
    return exponential_density(rate=1.0, shift=-1.0)


@pytest.fixture
def laplace():
    return render_asym_laplace_c(AsymLaplaceC(lambda1=1.0, lambda2=1.0))


@pytest.fixture
def triangle():
    """exp of a tent: log f = 1 - |x| on [-1, 1], normalised"""
    return normalize(GridDensity(knots=(-1.0, 0.0, 1.0), logvals=(0.0, 1.0, 0.0)))


@pytest.fixture
def generated():
    return [gen_logconcave_c(seed) for seed in range(25)]
