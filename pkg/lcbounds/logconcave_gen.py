"""
Generic log-concave models, validators and seeded generators.

GridDensity is a piecewise log-linear density: log f is linear between
consecutive knots and f vanishes outside [x_0, x_k]. It is log-concave
exactly when the slopes of log f are non-increasing, every moment is a
finite sum of incomplete-gamma terms, and the asymmetric Laplace law is
exactly representable on a truncation window.

DiscretePMF is a finitely supported probability sequence on the integers.
"""

import logging
from math import comb
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import special

from .config import MAX_KNOTS, MAX_SUPPORT_LEN
from .continuous_dists import AsymLaplaceC
from .continuous_dists import pdf as asym_laplace_pdf
from .discrete_dists import AsymLaplaceD, support_arrays
from .errors import DomainError, MalformedInputError, NotLogConcaveError
from .quadrature import composite_rule, integrate, refine_edges

logger = logging.getLogger(__name__)

SLOPE_TOL = 1e-12
LOG_FLOOR = -1e300
RENDER_TAIL_TOL = 1e-12
PMF_TAIL_TOL = 1e-15


# Models
class GridDensity(BaseModel):
    model_config = ConfigDict(frozen=True)

    knots: Tuple[float, ...]
    logvals: Tuple[float, ...]

    @model_validator(mode='after')
    def _check_structure(self):
        x = np.asarray(self.knots, dtype=float)
        lv = np.asarray(self.logvals, dtype=float)
        if x.size < 2 or x.size != lv.size:
            raise ValueError("need at least two knots and one log-value per knot")
        if not np.all(np.isfinite(x)) or np.any(np.diff(x) <= 0):
            raise ValueError("knots must be finite and strictly increasing")
        if np.any(np.isnan(lv)) or np.any(lv == np.inf):
            raise ValueError("log-values must be finite or -inf")
        if not np.all(np.isfinite(lv[1:-1])) or not np.any(np.isfinite(lv)):
            raise ValueError("-inf log-values are only allowed at the endpoints")
        if not np.any(np.isfinite(lv[:-1]) & np.isfinite(lv[1:])):
            raise ValueError("density must carry positive mass")
        return self

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.knots, dtype=float)

    @property
    def logf(self) -> np.ndarray:
        return np.asarray(self.logvals, dtype=float)

    @property
    def support(self) -> Tuple[float, float]:
        return self.knots[0], self.knots[-1]

    @property
    def slopes(self) -> np.ndarray:
        with np.errstate(invalid='ignore'):
            return np.diff(self.logf) / np.diff(self.x)

    def quadrature_rule(self, breakpoints: Sequence[float] = ()) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes and density-weighted weights for E[h(X)] ≈ Σ w_i h(x_i)"""
        lo, hi = self.support
        extra = [b for b in breakpoints if lo < b < hi]
        edges = np.union1d(self.x, extra)
        slopes = self.slopes
        piece = np.clip(np.searchsorted(self.x, edges[:-1], side='right') - 1, 0, slopes.size - 1)
        with np.errstate(divide='ignore'):
            max_width = 1.0 / np.abs(slopes[piece])
        nodes, weights = composite_rule(refine_edges(edges, max_width))
        return nodes, weights * pdf(self, nodes)


class DiscretePMF(BaseModel):
    model_config = ConfigDict(frozen=True)

    offset: int
    weights: Tuple[float, ...] = Field(min_length=1)

    @field_validator('weights')
    @classmethod
    def _check_weights(cls, v):
        w = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if w.sum() <= 0:
            raise ValueError("weights must carry positive mass")
        return v

    @property
    def w(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @property
    def support(self) -> np.ndarray:
        return self.offset + np.arange(len(self.weights))

    def prob(self, n: int) -> float:
        k = n - self.offset
        return float(self.weights[k]) if 0 <= k < len(self.weights) else 0.0

    def normalized(self) -> 'DiscretePMF':
        w = self.w
        return DiscretePMF(offset=self.offset, weights=tuple(w / w.sum()))


class ContinuousGenConfig(BaseModel):
    knot_count: int = Field(default=12, ge=2, le=MAX_KNOTS)
    domain: Tuple[float, float] = (-3.0, 3.0)
    slope_scale: float = Field(default=2.0, gt=0)

    @model_validator(mode='after')
    def _check_domain(self):
        if not self.domain[0] < self.domain[1]:
            raise ValueError("domain must be a non-empty interval")
        return self


class DiscreteGenConfig(BaseModel):
    support_len: int = Field(default=20, ge=1, le=MAX_SUPPORT_LEN)
    concavity_scale: float = Field(default=0.5, gt=0)


# Piecewise log-linear calculus
def pdf(f: GridDensity, x):
    xs = np.asarray(x, dtype=float)
    lv = np.where(np.isfinite(f.logf), f.logf, LOG_FLOOR)
    inside = (xs >= f.knots[0]) & (xs <= f.knots[-1])
    out = np.where(inside, np.exp(np.interp(xs, f.x, lv)), 0.0)
    return float(out) if np.ndim(x) == 0 else out


def max_density(f: GridDensity) -> float:
    return float(np.exp(np.max(f.logf)))


def _decay_integrals(order: int, c: np.ndarray) -> np.ndarray:
    """K_j(c) = ∫_0^1 v^j e^{-cv} dv for j = 0..order, c >= 0; shape (order+1, len(c))"""
    c = np.asarray(c, dtype=float)
    out = np.empty((order + 1, c.size))
    small = c < 1.0
    terms = np.arange(30)
    fact = special.factorial(terms)
    for j in range(order + 1):
        series = np.sum((-c[small, None]) ** terms / (fact * (j + terms + 1)), axis=1)
        big = c[~small]
        with np.errstate(over='ignore', divide='ignore'):
            closed = special.factorial(j) * special.gammainc(j + 1, big) / big ** (j + 1)
        out[j, small] = series
        out[j, ~small] = closed
    return out


def _piece_moments(x: np.ndarray, lv: np.ndarray, center: float, order: int) -> np.ndarray:
    """∫ (x - center)^k f over each piece, k = 0..order; shape (order+1, pieces)"""
    a, b = x[:-1], x[1:]
    la, lb = lv[:-1], lv[1:]
    live = np.isfinite(la) & np.isfinite(lb)
    anchor_left = la >= lb
    xa = np.where(anchor_left, a, b)
    lA = np.where(live, np.maximum(la, lb), 0.0)
    c = np.where(live, np.abs(lb - la), 0.0)
    h = b - a
    step = np.where(anchor_left, h, -h)
    K = _decay_integrals(order, c)
    base = xa - center
    out = np.zeros((order + 1, a.size))
    for k in range(order + 1):
        acc = np.zeros(a.size)
        for j in range(k + 1):
            acc += comb(k, j) * base ** (k - j) * step ** j * K[j]
        out[k] = np.where(live, h * np.exp(lA) * acc, 0.0)
    return out


def _with_knot(f: GridDensity, point: float) -> Tuple[np.ndarray, np.ndarray]:
    x, lv = f.x, f.logf
    if not x[0] < point < x[-1] or np.any(x == point):
        return x, lv
    i = np.searchsorted(x, point)
    t = (point - x[i - 1]) / (x[i] - x[i - 1])
    val = lv[i - 1] + t * (lv[i] - lv[i - 1])
    return np.insert(x, i, point), np.insert(lv, i, val)


def total_mass(f: GridDensity) -> float:
    return float(_piece_moments(f.x, f.logf, 0.0, 0)[0].sum())


def power_moments(f: GridDensity, order: int, center: float = 0.0) -> np.ndarray:
    """∫ (x - center)^k f dx for k = 0..order"""
    return _piece_moments(f.x, f.logf, center, order).sum(axis=1)


def mean(f: GridDensity) -> float:
    # about the highest knot, so tails far from 0 do not cancel
    anchor = float(f.x[int(np.argmax(f.logf))])
    m = _piece_moments(f.x, f.logf, anchor, 1).sum(axis=1)
    return anchor + float(m[1] / m[0])


def normalize(f: GridDensity) -> GridDensity:
    log_mass = np.log(total_mass(f))
    return GridDensity(knots=f.knots, logvals=tuple(f.logf - log_mass))


def moments_c(f: GridDensity, p: float = 2.0) -> Tuple[float, float, float]:
    """(mean, variance, E|X - EX|^p)"""
    if p < 1:
        raise DomainError(f"moment order must be at least 1, got {p}")
    mu = mean(f)
    x, lv = _with_knot(f, mu)
    is_int = float(p).is_integer()
    order = max(2, int(p)) if is_int else 2
    pieces = _piece_moments(x, lv, mu, order)
    mass = pieces[0].sum()
    var = pieces[2].sum() / mass
    if is_int:
        side = np.sign(0.5 * (x[:-1] + x[1:]) - mu)
        sigma_p = float(np.sum(side ** int(p) * pieces[int(p)]) / mass)
    else:
        sigma_p = integrate(lambda t: abs(t - mu) ** p * pdf(f, t), x[0], x[-1],
                            points=x[1:-1]) / mass
    return mu, float(var), sigma_p


def shifted(f: GridDensity, c: float) -> GridDensity:
    """Density of X + c"""
    return GridDensity(knots=tuple(f.x + c), logvals=f.logvals)


def scaled(f: GridDensity, c: float) -> GridDensity:
    """Density of cX for c != 0"""
    if c == 0:
        raise DomainError("scale factor must be non-zero")
    x, lv = f.x * c, f.logf - np.log(abs(c))
    if c < 0:
        x, lv = x[::-1], lv[::-1]
    return GridDensity(knots=tuple(x), logvals=tuple(lv))


# Validators
def is_logconcave_c(f: GridDensity, tol: float = SLOPE_TOL) -> bool:
    s = f.slopes
    if not np.isfinite(f.logvals[0]):
        s = s[1:]
    if not np.isfinite(f.logvals[-1]):
        s = s[:-1]
    scale = np.maximum(1.0, np.maximum(np.abs(s[:-1]), np.abs(s[1:])))
    return bool(np.all(np.diff(s) <= tol * scale))


def is_logconcave_d(g: DiscretePMF, rtol: float = 1e-12) -> bool:
    w = g.w
    positive = np.flatnonzero(w > 0)
    if positive.size == 0:
        return False
    core = w[positive[0]:positive[-1] + 1]
    if np.any(core <= 0):
        return False
    if core.size < 3:
        return True
    return bool(np.all(core[1:-1] ** 2 - core[:-2] * core[2:] >= -rtol * core[1:-1] ** 2))


# Generators
def gen_logconcave_c(seed: int, config: Optional[ContinuousGenConfig] = None) -> GridDensity:
    """Random normalised log-concave density with a concave piecewise-linear potential"""
    config = config or ContinuousGenConfig()
    rng = np.random.default_rng(seed)
    lo, hi = config.domain
    n = config.knot_count
    gaps = rng.uniform(0.2, 1.0, n - 1)
    knots = lo + (hi - lo) * np.concatenate([[0.0], np.cumsum(gaps) / gaps.sum()])
    knots[-1] = hi
    slopes = np.sort(rng.normal(0.0, config.slope_scale, n - 1))[::-1]
    logvals = np.concatenate([[0.0], np.cumsum(slopes * np.diff(knots))])
    logvals -= logvals.max()
    return normalize(GridDensity(knots=tuple(knots), logvals=tuple(logvals)))


def gen_logconcave_d(seed: int, config: Optional[DiscreteGenConfig] = None) -> DiscretePMF:
    """Random log-concave pmf: concave log-weights, exponentiated and normalised"""
    config = config or DiscreteGenConfig()
    rng = np.random.default_rng(seed)
    n = config.support_len
    increments = np.sort(rng.normal(0.0, config.concavity_scale, max(n - 1, 0)))[::-1]
    logw = np.concatenate([[0.0], np.cumsum(increments)])
    logw -= logw.max()
    keep = np.flatnonzero(logw > -600.0)
    logw = logw[keep[0]:keep[-1] + 1]
    w = np.exp(logw)
    offset = int(rng.integers(-10, 11)) + int(keep[0])
    return DiscretePMF(offset=offset, weights=tuple(w / w.sum()))


def moments_d(g: DiscretePMF, p: float = 2.0) -> Tuple[float, float, float]:
    if p < 1:
        raise DomainError(f"moment order must be at least 1, got {p}")
    n, w = g.support.astype(float), g.w
    w = w / w.sum()
    mu = float(np.sum(n * w))
    dev = n - mu
    return mu, float(np.sum(dev ** 2 * w)), float(np.sum(np.abs(dev) ** p * w))


def max_mass(g: DiscretePMF) -> float:
    w = g.w
    return float(w.max() / w.sum())


# Exact renderings
def _window_units(tail_tol: float, weight_power: float = 4.0) -> float:
    """Smallest u with e^-u (1 + u)^w below tail_tol"""
    u = -np.log(tail_tol)
    while np.exp(-u) * (1 + u) ** weight_power >= tail_tol:
        u += 1.0
    return u


def render_asym_laplace_c(d: AsymLaplaceC, tail_tol: float = RENDER_TAIL_TOL,
                          knot_count: Optional[int] = None, include_mode: bool = True,
                          weight_power: float = 4.0) -> GridDensity:
    """GridDensity equal to d on a window whose omitted |x|^weight_power weighted tail is below tail_tol"""
    u = _window_units(tail_tol, weight_power)
    lo = d.mode - d.lambda1 * u
    hi = d.mode + d.lambda2 * u
    if knot_count is None:
        knots = np.unique([lo, d.mode, hi])
    else:
        knots = np.linspace(lo, hi, knot_count)
        if include_mode:
            knots = np.union1d(knots, [d.mode])
    with np.errstate(divide='ignore'):
        logvals = np.log(asym_laplace_pdf(d, knots))
    return normalize(GridDensity(knots=tuple(knots), logvals=tuple(logvals)))


def render_asym_laplace_d(d: AsymLaplaceD, tail_tol: float = PMF_TAIL_TOL) -> DiscretePMF:
    n, w = support_arrays(d, tol=tail_tol)
    return DiscretePMF(offset=int(n[0]), weights=tuple(w / w.sum()))


def uniform_density(lo: float = -0.5, hi: float = 0.5) -> GridDensity:
    if not lo < hi:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    level = -np.log(hi - lo)
    return GridDensity(knots=(lo, hi), logvals=(level, level))


def exponential_density(rate: float = 1.0, shift: float = 0.0, tail_tol: float = RENDER_TAIL_TOL,
                        weight_power: float = 4.0) -> GridDensity:
    """Density rate·exp(-rate (x - shift)) on [shift, ∞), truncated"""
    if rate <= 0:
        raise DomainError(f"rate must be positive, got {rate}")
    return render_asym_laplace_c(AsymLaplaceC(lambda1=0.0, lambda2=1.0 / rate, mode=shift), tail_tol,
                                 weight_power=weight_power)


def require_logconcave(obj: Union[GridDensity, DiscretePMF]) -> None:
    ok = is_logconcave_c(obj) if isinstance(obj, GridDensity) else is_logconcave_d(obj)
    if not ok:
        raise NotLogConcaveError(f"{type(obj).__name__} is not log-concave")


# CSV formats
def read_grid_density_csv(path: Union[str, Path]) -> GridDensity:
    """Read `x,logf` rows (knots ascending) and normalise"""
    try:
        df = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MalformedInputError(f"cannot read {path}: {e}")
    if list(df.columns) != ['x', 'logf']:
        raise MalformedInputError(f"{path}: expected header 'x,logf', got {','.join(map(str, df.columns))}")
    try:
        x = pd.to_numeric(df['x']).to_numpy(dtype=float)
        lv = pd.to_numeric(df['logf']).to_numpy(dtype=float)
    except (ValueError, TypeError) as e:
        raise MalformedInputError(f"{path}: non-numeric value: {e}")
    if np.any(np.diff(x) <= 0):
        raise MalformedInputError(f"{path}: knots must be strictly ascending")
    try:
        return normalize(GridDensity(knots=tuple(x), logvals=tuple(lv)))
    except ValueError as e:
        raise MalformedInputError(f"{path}: {e}")


def write_grid_density_csv(f: GridDensity, path: Optional[Union[str, Path]] = None) -> Optional[str]:
    """Write `x,logf` rows; returns the text when no path is given"""
    return pd.DataFrame({'x': f.x, 'logf': f.logf}).to_csv(path, index=False)


def read_pmf_csv(path: Union[str, Path]) -> DiscretePMF:
    """Read consecutive `n,p` rows and normalise"""
    try:
        df = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MalformedInputError(f"cannot read {path}: {e}")
    if list(df.columns) != ['n', 'p']:
        raise MalformedInputError(f"{path}: expected header 'n,p', got {','.join(map(str, df.columns))}")
    try:
        n = pd.to_numeric(df['n']).to_numpy()
        w = pd.to_numeric(df['p']).to_numpy(dtype=float)
    except (ValueError, TypeError) as e:
        raise MalformedInputError(f"{path}: non-numeric value: {e}")
    if n.size == 0 or np.any(n != np.round(n)) or np.any(np.diff(n) != 1):
        raise MalformedInputError(f"{path}: n must be consecutive ascending integers")
    if np.any(w < 0):
        raise MalformedInputError(f"{path}: negative probability")
    try:
        return DiscretePMF(offset=int(n[0]), weights=tuple(w)).normalized()
    except ValueError as e:
        raise MalformedInputError(f"{path}: {e}")


def write_pmf_csv(g: DiscretePMF, path: Optional[Union[str, Path]] = None) -> Optional[str]:
    return pd.DataFrame({'n': g.support, 'p': g.w}).to_csv(path, index=False)


def read_law_csv(path: Union[str, Path]) -> Union[GridDensity, DiscretePMF]:
    """Dispatch on the header: `x,logf` is a density, `n,p` a pmf"""
    try:
        columns = list(pd.read_csv(path, nrows=0).columns)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MalformedInputError(f"cannot read {path}: {e}")
    if columns == ['n', 'p']:
        return read_pmf_csv(path)
    return read_grid_density_csv(path)
