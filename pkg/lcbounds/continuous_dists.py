"""
Continuous asymmetric Laplace family on the real line.

The density with left scale lambda1, right scale lambda2 and mode m is

    g(x) = exp(-|x - m| / lambda1) / (lambda1 + lambda2)   for x <= m
    g(x) = exp(-(x - m) / lambda2) / (lambda1 + lambda2)   for x >  m

with the one-sided exponentials as the degenerate cases lambda1 = 0 or
lambda2 = 0. Its maximum is M = 1 / (lambda1 + lambda2), attained at the mode.
Superlevel sets are intervals of measure log(M/t) / M, independent of the
split between the two scales.
"""

import logging
from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from .errors import DomainError, ParameterRangeError
from .quadrature import integrate

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class AsymLaplaceC(BaseModel):
    model_config = ConfigDict(frozen=True)

    lambda1: float
    lambda2: float
    mode: float = 0.0

    @model_validator(mode='after')
    def _check_scales(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("scales must be non-negative")
        if self.lambda1 + self.lambda2 <= 0:
            raise ValueError("at least one scale must be positive")
        return self

    @property
    def max_density(self) -> float:
        return 1.0 / (self.lambda1 + self.lambda2)


class Interval(BaseModel):
    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float

    @model_validator(mode='after')
    def _check_order(self):
        if self.hi < self.lo:
            raise ValueError("interval must satisfy lo <= hi")
        return self

    @property
    def measure(self) -> float:
        return self.hi - self.lo

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)


def make_asym_laplace(lambda1: float, lambda2: float, mode: float = 0.0) -> AsymLaplaceC:
    """Build an AsymLaplaceC, reporting invalid scales as ParameterRangeError"""
    try:
        return AsymLaplaceC(lambda1=lambda1, lambda2=lambda2, mode=mode)
    except ValueError as e:
        raise ParameterRangeError(f"invalid asymmetric Laplace ({lambda1}, {lambda2}): {e}")


def _scalar_or_array(value: np.ndarray, like) -> ArrayLike:
    return float(value) if np.ndim(like) == 0 else value


def pdf(d: AsymLaplaceC, x: ArrayLike) -> ArrayLike:
    y = np.asarray(x, dtype=float) - d.mode
    M = d.max_density
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        if d.lambda1 > 0:
            left = M * np.exp(np.minimum(y, 0.0) / d.lambda1)
        else:
            left = np.where(y == 0, M, 0.0)
        if d.lambda2 > 0:
            right = M * np.exp(-np.maximum(y, 0.0) / d.lambda2)
        else:
            right = np.zeros_like(y)
    out = np.where(y <= 0, left, right)
    return _scalar_or_array(out, x)


def cdf(d: AsymLaplaceC, x: ArrayLike) -> ArrayLike:
    y = np.asarray(x, dtype=float) - d.mode
    total = d.lambda1 + d.lambda2
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        if d.lambda1 > 0:
            left = d.lambda1 / total * np.exp(np.minimum(y, 0.0) / d.lambda1)
        else:
            left = np.zeros_like(y)
        if d.lambda2 > 0:
            right = 1.0 - d.lambda2 / total * np.exp(-np.maximum(y, 0.0) / d.lambda2)
        else:
            right = np.ones_like(y)
    out = np.where(y <= 0, left, right)
    return _scalar_or_array(out, x)


def mgf(d: AsymLaplaceC, t: float) -> float:
    """E[exp(tX)], including the factor exp(t m) for a shifted mode"""
    lower = -np.inf if d.lambda1 == 0 else -1.0 / d.lambda1
    upper = np.inf if d.lambda2 == 0 else 1.0 / d.lambda2
    if not lower < t < upper:
        raise DomainError(f"mgf argument {t} outside ({lower}, {upper})")
    return float(np.exp(t * d.mode) / ((1.0 + t * d.lambda1) * (1.0 - t * d.lambda2)))


def mean_var(d: AsymLaplaceC) -> Tuple[float, float]:
    return d.mode + d.lambda2 - d.lambda1, d.lambda1 ** 2 + d.lambda2 ** 2


def central_abs_moment(d: AsymLaplaceC, p: float) -> float:
    """E|X - EX|^p by adaptive quadrature split at the mode and the mean"""
    if p < 0:
        raise DomainError(f"moment order must be non-negative, got {p}")
    mu, _ = mean_var(d)
    lo = -np.inf if d.lambda1 > 0 else d.mode
    hi = np.inf if d.lambda2 > 0 else d.mode
    return integrate(lambda x: abs(x - mu) ** p * pdf(d, x), lo, hi, points=[d.mode, mu])


def superlevel_set(d: AsymLaplaceC, t: float) -> Interval:
    """The interval {pdf > t}; its measure is log(M/t) / M"""
    M = d.max_density
    if not 0 < t < M:
        raise DomainError(f"level {t} must lie in (0, {M})")
    L = np.log(M / t)
    return Interval(lo=d.mode - d.lambda1 * L, hi=d.mode + d.lambda2 * L)


def interval_overlap(a: ArrayLike, b: ArrayLike, x: ArrayLike) -> ArrayLike:
    """|[-a, a] ∩ [x - b, x + b]|, non-increasing in |x|"""
    a_, b_, ax = np.asarray(a, float), np.asarray(b, float), np.abs(np.asarray(x, float))
    out = np.where(
        ax <= np.abs(b_ - a_),
        2.0 * np.minimum(a_, b_),
        np.where(ax <= a_ + b_, a_ + b_ - ax, 0.0),
    )
    if np.ndim(a) == 0 and np.ndim(b) == 0 and np.ndim(x) == 0:
        return float(out)
    return out


def tail_superlevel_measure(d: AsymLaplaceC, a: float, t: float, mean_tol: float = 1e-9) -> float:
    """|[-a, a]^c ∩ {pdf > t}| for a mean-zero asymmetric Laplace"""
    mu, _ = mean_var(d)
    if abs(mu) > mean_tol * max(1.0, 1.0 / d.max_density):
        raise DomainError(f"tail_superlevel_measure expects a mean-zero law, mean is {mu}")
    if a < 0:
        raise DomainError(f"half-width must be non-negative, got {a}")
    level_set = superlevel_set(d, t)
    half = 0.5 * level_set.measure
    if a == 0 or half == 0:
        return level_set.measure
    return level_set.measure - interval_overlap(a, half, level_set.center)


def mean_zero_family(M: float, lambda2: float) -> AsymLaplaceC:
    """Mean-zero asymmetric Laplace with maximum M, parameterised by lambda2 in [0, 1/M]"""
    if M <= 0:
        raise DomainError(f"maximum must be positive, got {M}")
    if not 0 <= lambda2 <= 1.0 / M:
        raise DomainError(f"lambda2 = {lambda2} outside [0, {1.0 / M}]")
    lambda1 = max(1.0 / M - lambda2, 0.0)
    return make_asym_laplace(lambda1, lambda2, mode=1.0 / M - 2.0 * lambda2)
