"""
Discrete asymmetric Laplace family on the integers.

    g(n) = C * p^|n - m|   for n <= m
    g(n) = C * q^(n - m)   for n >= m,      C = (1-p)(1-q) / (1-pq)

p = q = 0 is the point mass at m, p = 0 the geometric law and q = 0 the
reflected geometric law. The module also carries the fixed-maximum
reparameterisation used to bound the variance and the fourth central moment.
"""

import logging
from typing import TYPE_CHECKING, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from .errors import DomainError, ParameterRangeError

if TYPE_CHECKING:
    from .logconcave_gen import DiscretePMF

logger = logging.getLogger(__name__)

SERIES_TAIL_TOL = 1e-15
RANGE_SLACK = 1e-12


class AsymLaplaceD(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float
    q: float
    mode: int = 0

    @model_validator(mode='after')
    def _check_ratios(self):
        if not (0 <= self.p < 1 and 0 <= self.q < 1):
            raise ValueError("ratios must lie in [0, 1)")
        return self

    @property
    def normalizer(self) -> float:
        return (1 - self.p) * (1 - self.q) / (1 - self.p * self.q)

    @property
    def max_density(self) -> float:
        return self.normalizer


def make_asym_laplace_d(p: float, q: float, mode: int = 0) -> AsymLaplaceD:
    try:
        return AsymLaplaceD(p=p, q=q, mode=mode)
    except ValueError as e:
        raise ParameterRangeError(f"invalid discrete asymmetric Laplace ({p}, {q}): {e}")


def pmf(d: AsymLaplaceD, n: Union[int, np.ndarray]) -> Union[float, np.ndarray]:
    k = np.asarray(n) - d.mode
    out = d.normalizer * np.where(k <= 0, np.power(d.p, np.abs(np.minimum(k, 0))),
                                  np.power(d.q, np.maximum(k, 0)))
    return float(out) if np.ndim(n) == 0 else out


def mean_var_d(d: AsymLaplaceD) -> Tuple[float, float]:
    p, q = d.p, d.q
    mean = d.mode + (q - p) / ((1 - q) * (1 - p))
    var = p / (1 - p) ** 2 + q / (1 - q) ** 2
    return mean, var


def mgf_d(d: AsymLaplaceD, t: float) -> float:
    lower = -np.inf if d.p == 0 else np.log(d.p)
    upper = np.inf if d.q == 0 else -np.log(d.q)
    if not lower < t < upper:
        raise DomainError(f"mgf argument {t} outside ({lower}, {upper})")
    value = (1 - d.p) * (1 - d.q) / ((np.exp(t) - d.p) * (np.exp(-t) - d.q))
    return float(np.exp(t * d.mode) * value)


def _into_unit(x: float, name: str) -> float:
    if -RANGE_SLACK < x < 0:
        return 0.0
    if not 0 <= x < 1:
        raise ParameterRangeError(f"solved {name} = {x} outside [0, 1)")
    return x


def solve_pq(g0: float, mu: float) -> Tuple[float, float]:
    """Ratios (p, q) of the mode-0 law with pmf(0) = g0 and mean mu"""
    if not 0 < g0 <= 1:
        raise ParameterRangeError(f"mass at the mode must lie in (0, 1], got {g0}")
    p_den = 1 - g0 * (mu - 1)
    q_den = 1 + g0 * (mu + 1)
    if p_den <= 0 or q_den <= 0:
        raise ParameterRangeError(f"no asymmetric Laplace with pmf(0) = {g0} and mean {mu}")
    p = (1 - g0 * (mu + 1)) / p_den
    q = (1 + g0 * (mu - 1)) / q_den
    return _into_unit(p, 'p'), _into_unit(q, 'q')


def _check_fixed_max_range(M: float, q: float) -> None:
    if not 0 < M <= 1:
        raise ParameterRangeError(f"maximum must lie in (0, 1], got {M}")
    q_max = (1 - M) / (1 + M)
    if not -RANGE_SLACK <= q <= q_max + RANGE_SLACK:
        raise ParameterRangeError(f"q = {q} outside [0, {q_max}] for M = {M}")


def from_max_and_q(M: float, q: float) -> AsymLaplaceD:
    """Mode-0 law with maximum M and right ratio q (left ratio implied)"""
    _check_fixed_max_range(M, q)
    q = min(max(q, 0.0), (1 - M) / (1 + M))
    p = (1 - q - M) / (1 - q - M * q)
    return make_asym_laplace_d(max(p, 0.0), q)


def variance_reparam(M: float, q: float) -> float:
    _check_fixed_max_range(M, q)
    return 1 / M ** 2 - (1 + q) / (M * (1 - q)) + 2 * q / (1 - q) ** 2


def sigma4_closed(M: float, q: float) -> float:
    """Fourth central moment of the fixed-maximum law as a function of q"""
    _check_fixed_max_range(M, q)
    c0 = (1 - q) ** 4
    c1 = (1 - q) ** 3 * (1 + q)
    c2 = (1 - q) ** 2 * (1 + 4 * q + q ** 2)
    c3 = 1 + 22 * q - 22 * q ** 3 - q ** 4
    c4 = 1 + 10 * q + q ** 2
    numer = 9 * c0 - 18 * c1 * M + 10 * c2 * M ** 2 - c3 * M ** 3 + 2 * q * c4 * M ** 4
    return numer / (M ** 4 * (1 - q) ** 4)


def sigma4_derivative(M: float, q: float) -> float:
    _check_fixed_max_range(M, q)
    k0 = (1 - q) ** 3
    k1 = (1 - q) ** 2 * (1 + q)
    k2 = 1 + (33 / 13) * q - (33 / 13) * q ** 2 - q ** 3
    k3 = 1 + 23 * q + 23 * q ** 2 + q ** 3
    return 2 * (-18 * k0 + 30 * k1 * M - 13 * k2 * M ** 2 + k3 * M ** 3) / (M ** 3 * (1 - q) ** 5)


def truncation_length(r: float, weight_power: float = 4.0, tol: float = SERIES_TAIL_TOL,
                      offset: float = 0.0) -> int:
    """Smallest K with r^K (K + offset)^w / (1 - r) below tol"""
    if r == 0:
        return 0
    if not 0 < r < 1:
        raise ParameterRangeError(f"ratio {r} outside [0, 1)")

    def bound(k: int) -> float:
        return r ** k * max(1.0, (k + offset) ** weight_power) / (1 - r)

    k = max(1, int(np.ceil(np.log(tol * (1 - r)) / np.log(r))))
    while bound(k) >= tol:
        k += max(1, k // 64)
    logger.debug(f"truncation length {k} for ratio {r}")
    return k


def support_arrays(d: AsymLaplaceD, weight_power: float = 4.0,
                   tol: float = SERIES_TAIL_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Integers and masses covering everything but a weighted tail below tol"""
    shift = abs(mean_var_d(d)[0] - d.mode) + 1
    left = truncation_length(d.p, weight_power, tol, shift)
    right = truncation_length(d.q, weight_power, tol, shift)
    n = np.arange(d.mode - left, d.mode + right + 1)
    return n, pmf(d, n)


def sigma4_series(d: AsymLaplaceD) -> float:
    """Brute-force sum of (n - mean)^4 pmf(n)"""
    n, w = support_arrays(d)
    mu = mean_var_d(d)[0]
    return float(np.sum((n - mu) ** 4 * w))


def is_asym_laplace_d(g: 'DiscretePMF', mode: int, rtol: float = 1e-9, atol: float = 1e-13) -> bool:
    """Whether g is (up to a negligible truncated tail) an asymmetric Laplace law with this mode"""
    w = np.asarray(g.weights, dtype=float)
    k = mode - g.offset
    if not 0 <= k < w.size or w[k] <= 0:
        return False
    p = w[k - 1] / w[k] if k > 0 else 0.0
    q = w[k + 1] / w[k] if k + 1 < w.size else 0.0
    if not (p < 1 and q < 1):
        return False
    idx = np.arange(w.size) - k
    model = w[k] * np.where(idx <= 0, np.power(p, np.abs(np.minimum(idx, 0))),
                            np.power(q, np.maximum(idx, 0)))
    if np.any(np.abs(w - model) > atol + rtol * np.maximum(w, model)):
        return False
    normalizer = (1 - p) * (1 - q) / (1 - p * q)
    return abs(normalizer - w[k]) <= max(rtol, 1e-9) * normalizer
