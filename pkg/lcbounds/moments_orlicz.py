"""
Orlicz norms, subfactorials and the sharp absolute-central-moment constants.

For a log-concave X with maximal density M the p-th absolute central moment
is pinned between the uniform and the exponential law of the same maximum:

    1 / (2^p (p + 1))  <=  M^p E|X - EX|^p  <=  Γ(1+p)/e + ∫_0^1 (1-x)^p e^{-x} dx

and for even integers the upper constant is the subfactorial !p.
"""

import logging
import math
from typing import Callable, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import special

from .errors import DivergenceError, DomainError, NumericalError, SubfactorialOverflowError
from .logconcave_gen import DiscretePMF, GridDensity, exponential_density, mean, uniform_density
from .quadrature import integrate

logger = logging.getLogger(__name__)

MAX_EXACT_SUBFACTORIAL = 20
BISECTION_CAP = 200
DOUBLING_SLACK = 1e-9
CHECK_GRID = np.linspace(0.0, 10.0, 401)


class YoungFunction(BaseModel):
    """Strictly increasing convex ψ with ψ(0) = 0, evaluated elementwise"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    descriptor: str
    evaluate: Callable[[np.ndarray], np.ndarray]

    @model_validator(mode='after')
    def _check_shape(self):
        y = np.asarray(self.evaluate(CHECK_GRID), dtype=float)
        scale = max(1.0, float(np.max(np.abs(y))))
        if abs(y[0]) > 1e-12:
            raise ValueError(f"{self.descriptor}: ψ(0) = {y[0]} is not 0")
        if np.any(np.diff(y) <= 0):
            raise ValueError(f"{self.descriptor}: ψ is not strictly increasing on [0, 10]")
        if np.any(np.diff(y, 2) < -1e-12 * scale):
            raise ValueError(f"{self.descriptor}: ψ is not convex on [0, 10]")
        return self

    def __call__(self, x):
        return self.evaluate(x)


def power_young(p: float) -> YoungFunction:
    """ψ_p(x) = x^p, p >= 1"""
    if p < 1:
        raise DomainError(f"power Young function needs p >= 1, got {p}")
    return YoungFunction(descriptor=f"p={p:g}", evaluate=lambda x: np.power(np.abs(x), p))


def exp_young() -> YoungFunction:
    """ψ(x) = e^x - 1"""
    return YoungFunction(descriptor="exp", evaluate=lambda x: np.expm1(np.abs(x)))


def parse_young(text: str) -> YoungFunction:
    """Parse 'p=<p>' or 'exp' as used on the command line"""
    text = text.strip()
    if text == 'exp':
        return exp_young()
    key, _, value = text.partition('=')
    if key.strip() != 'p' or not value:
        raise DomainError(f"unknown Young function '{text}', expected p=<p> or exp")
    try:
        return power_young(float(value))
    except ValueError:
        raise DomainError(f"invalid power in '{text}'")


# Orlicz norms
def _deviation_rule(w: Union[GridDensity, DiscretePMF], center: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Points |x - c| and weights with E h(|W - c|) ≈ Σ weight·h(point)"""
    if isinstance(w, DiscretePMF):
        weights = w.w / w.w.sum()
        n = w.support.astype(float)
        c = float(np.sum(n * weights)) if center else 0.0
        return np.abs(n - c), weights
    c = mean(w) if center else 0.0
    lo, hi = w.support
    span = hi - lo
    # geometric cells around the kink of |x - c|
    near = c + np.concatenate([-span * 2.0 ** -np.arange(1, 40), [0.0], span * 2.0 ** -np.arange(1, 40)])
    nodes, weights = w.quadrature_rule(near)
    return np.abs(nodes - c), weights


def orlicz_norm(w: Union[GridDensity, DiscretePMF], psi: YoungFunction, tol: float = 1e-10,
                center: bool = False) -> float:
    """inf{t > 0 : Eψ(|W|/t) <= 1} by bisection (of W - EW when center is set)"""
    dev, weights = _deviation_rule(w, center)
    live = (dev > 0) & (weights > 0)
    if not np.any(live):
        return 0.0
    dev, weights = dev[live], weights[live]

    def expected(t: float) -> float:
        with np.errstate(over='ignore', invalid='ignore'):
            value = float(np.sum(weights * psi(dev / t)))
        return value if np.isfinite(value) else np.inf

    hi, e_hi = 1.0, expected(1.0)
    while e_hi > 1:
        hi *= 2.0
        e_prev, e_hi = e_hi, expected(hi)
        # convexity and ψ(0) = 0 give Eψ(|W|/2t) <= Eψ(|W|/t) / 2
        if hi > 1e300 or (np.isfinite(e_prev) and e_hi > 1 and e_hi > 0.5 * e_prev * (1 + DOUBLING_SLACK)):
            raise DivergenceError(f"Eψ(|W|/t) stays above 1 as t grows ({psi.descriptor})")
    lo = hi / 2.0
    while expected(lo) <= 1:
        lo /= 2.0
        if lo < 1e-300:
            return 0.0
    e_lo, e_hi = expected(lo), expected(hi)

    for i in range(BISECTION_CAP):
        mid = 0.5 * (lo + hi)
        e_mid = expected(mid)
        if not e_lo >= e_mid >= e_hi:
            raise NumericalError(f"Eψ(|W|/t) not monotone near t = {mid}")
        if abs(e_mid - 1) <= tol or hi - lo <= 1e-15 * hi:
            logger.debug(f"orlicz norm ({psi.descriptor}) converged after {i + 1} steps: {mid}")
            return mid
        if e_mid > 1:
            lo, e_lo = mid, e_mid
        else:
            hi, e_hi = mid, e_mid
    raise NumericalError(f"orlicz norm bisection did not converge in {BISECTION_CAP} steps")


def sandwich_bounds(M: float, psi: YoungFunction) -> Tuple[float, float]:
    """(‖U - EU‖_ψ, ‖Z - EZ‖_ψ) for the uniform and exponential law with maximum M"""
    if M <= 0:
        raise DomainError(f"maximum must be positive, got {M}")
    half = 0.5 / M
    lower = orlicz_norm(uniform_density(-half, half), psi, center=True)
    upper = orlicz_norm(exponential_density(rate=M), psi, center=True)
    return lower, upper


# Subfactorials and ACM constants
def gamma_fn(x: float) -> float:
    if float(x).is_integer() and 1 <= x <= 171:
        return float(math.factorial(int(x) - 1))
    return float(special.gamma(x))


def subfactorial(n: int) -> int:
    """!n, the number of derangements of n elements"""
    if n < 0:
        raise DomainError(f"subfactorial needs n >= 0, got {n}")
    if n > MAX_EXACT_SUBFACTORIAL:
        raise SubfactorialOverflowError(f"exact subfactorial only up to n = {MAX_EXACT_SUBFACTORIAL}, got {n}")
    value = 1
    for k in range(1, n + 1):
        value = k * value + (-1) ** k
    return value


def subfactorial_integral(n: int) -> float:
    """∫_0^∞ (x - 1)^n e^{-x} dx"""
    if n < 0:
        raise DomainError(f"subfactorial needs n >= 0, got {n}")
    # tail beyond n + 80 is below double precision
    return integrate(lambda x: (x - 1.0) ** n * np.exp(-x), 0.0, n + 80.0, points=[1.0, float(n)],
                     abs_tol=1e-13, rel_tol=1e-13)


def acm_bounds(p: float) -> Tuple[float, float]:
    """Sharp (lower, upper) constants for M^p E|X - EX|^p over log-concave X"""
    if p < 1:
        raise DomainError(f"acm bounds need p >= 1, got {p}")
    lower = 1.0 / (2.0 ** p * (p + 1.0))
    upper = gamma_fn(1.0 + p) / math.e + integrate(lambda x: (1.0 - x) ** p * np.exp(-x), 0.0, 1.0)
    if float(p).is_integer() and p <= MAX_EXACT_SUBFACTORIAL:
        n = int(p)
        fact_over_e = math.factorial(n) / math.e
        exact = fact_over_e + (-1) ** n * (subfactorial(n) - fact_over_e)
        if abs(exact - upper) > 1e-10 * max(1.0, exact):
            raise NumericalError(f"acm upper bound disagreement at p = {n}: {exact} vs {upper}")
        upper = float(subfactorial(n)) if n % 2 == 0 else exact
    return lower, upper
