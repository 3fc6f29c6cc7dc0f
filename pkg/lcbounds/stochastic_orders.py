"""
Crossing patterns of density differences and stochastic-order certificates.

Two paths are offered for X1 ≺ X2:
1. certify_order: sign changes of φ = g2 - g1 together with matched moments
   (the Karlin-Novikoff criterion, orientation φ(x)·Π(x - x_k) >= 0);
2. empirical_order_check: a finite, fixed bank of test functions that can
   only falsify an order.
"""

import logging
from enum import Enum
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .config import NUM_TOL
from .errors import DomainError
from .logconcave_gen import DiscretePMF, GridDensity, max_density, mean, pdf, power_moments

logger = logging.getLogger(__name__)

Law = Union[GridDensity, DiscretePMF]

CROSSING_XTOL = 1e-10
DEAD_BAND = 1e-12
CERTIFY_DEAD_BAND = 1e-9
BANK_ANCHORS = 21


class OrderClass(str, Enum):
    INCREASING = 'increasing'
    CONVEX = 'convex'
    INCREASING_CONVEX = 'increasing_convex'
    ORDER_3 = 'order_3'
    ORDER_4 = 'order_4'

    @classmethod
    def for_order(cls, n: int) -> 'OrderClass':
        try:
            return {1: cls.INCREASING, 2: cls.CONVEX, 3: cls.ORDER_3, 4: cls.ORDER_4}[n]
        except KeyError:
            raise DomainError(f"no test bank for order {n}")


class Verdict(str, Enum):
    CERTIFIED = 'certified'
    REFUTED = 'refuted'
    INCONCLUSIVE = 'inconclusive'


class CrossingPattern(BaseModel):
    model_config = ConfigDict(frozen=True)

    crossings: Tuple[float, ...] = ()
    initial_sign: int = 0

    @field_validator('initial_sign')
    @classmethod
    def _check_sign(cls, v):
        if v not in (-1, 0, 1):
            raise ValueError("initial sign must be -1, 0 or 1")
        return v

    @field_validator('crossings')
    @classmethod
    def _check_sorted(cls, v):
        if any(b <= a for a, b in zip(v[:-1], v[1:])):
            raise ValueError("crossing locations must be strictly increasing")
        return v

    @property
    def count(self) -> int:
        return len(self.crossings)

    @property
    def final_sign(self) -> int:
        return self.initial_sign * (-1) ** self.count

    @property
    def signs(self) -> List[int]:
        return [self.initial_sign * (-1) ** k for k in range(self.count + 1)] if self.initial_sign else []


class OrderCertificate(BaseModel):
    model_config = ConfigDict(frozen=True)

    order_n: int = Field(ge=1)
    crossings: CrossingPattern
    matched_moments: Tuple[Tuple[int, float], ...] = ()
    verdict: Verdict
    witness: Optional[str] = None
    max_violation: float = 0.0


class BankFunction(NamedTuple):
    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    breakpoints: Tuple[float, ...] = ()


class OrderCheckReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    order_class: OrderClass
    max_violation: float
    worst: Optional[str] = None
    consistent: bool


# Crossing analysis
def _sign(values: np.ndarray, eps: float) -> np.ndarray:
    return np.where(values > eps, 1, np.where(values < -eps, -1, 0))


def _cell_samples(g: GridDensity, edges: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """One-sided values of g at the left and right end of every cell"""
    lo, hi = g.support
    a, b = edges[:-1], edges[1:]
    inside = (a >= lo) & (b <= hi)
    return np.where(inside, pdf(g, a), 0.0), np.where(inside, pdf(g, b), 0.0)


def _locate(phi: Callable[[float], float], lo: float, hi: float, s_lo: int) -> float:
    """Bisection for the sign change of phi between lo and hi"""
    while hi - lo > CROSSING_XTOL:
        mid = 0.5 * (lo + hi)
        value = phi(mid)
        if value == 0:
            return mid
        if np.sign(value) == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sign_runs(positions: np.ndarray, signs: np.ndarray,
               locate: Callable[[float, float, int], float]) -> CrossingPattern:
    crossings: List[float] = []
    current, last_pos, initial = 0, None, 0
    for pos, s in zip(positions, signs):
        if s == 0:
            continue
        if current == 0:
            initial = current = int(s)
        elif s != current:
            crossings.append(locate(last_pos, pos, current))
            current = int(s)
        last_pos = pos
    # bisection may land two jump crossings on one knot
    for k in range(1, len(crossings)):
        if crossings[k] <= crossings[k - 1]:
            crossings[k] = np.nextafter(crossings[k - 1], np.inf)
    return CrossingPattern(crossings=tuple(crossings), initial_sign=initial)


def crossing_pattern(g1: Law, g2: Law, eps: Optional[float] = None) -> CrossingPattern:
    """Sign changes of φ = g2 - g1; |φ| <= eps counts as zero and does not break a run"""
    if isinstance(g1, GridDensity) and isinstance(g2, GridDensity):
        if eps is None:
            eps = DEAD_BAND * max(max_density(g1), max_density(g2))
        edges = np.union1d(g1.x, g2.x)
        l1, r1 = _cell_samples(g1, edges)
        l2, r2 = _cell_samples(g2, edges)
        positions = np.column_stack([edges[:-1], edges[1:]]).ravel()
        signs = _sign(np.column_stack([l2 - l1, r2 - r1]).ravel(), eps)

        def phi(x: float) -> float:
            return pdf(g2, x) - pdf(g1, x)

        return _sign_runs(positions, signs, lambda lo, hi, s: _locate(phi, lo, hi, s))

    if isinstance(g1, DiscretePMF) and isinstance(g2, DiscretePMF):
        w1, w2 = g1.w / g1.w.sum(), g2.w / g2.w.sum()
        if eps is None:
            eps = DEAD_BAND * max(w1.max(), w2.max())
        lo = min(g1.offset, g2.offset)
        hi = max(g1.offset + w1.size, g2.offset + w2.size)
        n = np.arange(lo, hi)
        phi_n = np.array([g2.prob(k) for k in n]) / g2.w.sum() - np.array([g1.prob(k) for k in n]) / g1.w.sum()
        return _sign_runs(n.astype(float), _sign(phi_n, eps), lambda a, b, s: 0.5 * (a + b))

    raise DomainError("crossing patterns need two densities or two pmfs")


# Expectations and test banks
def _pmf_arrays(g: DiscretePMF) -> Tuple[np.ndarray, np.ndarray]:
    return g.support.astype(float), g.w / g.w.sum()


def law_mean(g: Law) -> float:
    if isinstance(g, GridDensity):
        return mean(g)
    n, w = _pmf_arrays(g)
    return float(np.sum(n * w))


def expectation(g: Law, fn: Callable[[np.ndarray], np.ndarray], breakpoints: Sequence[float] = (),
                deviation: bool = False) -> float:
    """E fn(X), or E fn(|X - EX|) when deviation is set"""
    return float(expectations(g, [BankFunction('fn', fn, tuple(breakpoints))], deviation)[0])


def expectations(g: Law, bank: Sequence[BankFunction], deviation: bool = False) -> np.ndarray:
    center = law_mean(g) if deviation else 0.0
    if isinstance(g, DiscretePMF):
        nodes, weights = _pmf_arrays(g)
    else:
        cuts = [center] if deviation else []
        for t in bank:
            cuts.extend(t.breakpoints)
            if deviation:
                cuts.extend([center - b for b in t.breakpoints] + [center + b for b in t.breakpoints])
        nodes, weights = g.quadrature_rule(cuts)
    values = np.abs(nodes - center) if deviation else nodes
    return np.array([np.sum(weights * t.fn(values)) for t in bank])


def _hinge(a: float, power: int = 1) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: np.maximum(x - a, 0.0) ** power


def _ramp(a: float, width: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: np.clip((x - a) / width, 0.0, 1.0)


def test_bank(order_class: OrderClass, support: Tuple[float, float],
              scale: Optional[float] = None) -> List[BankFunction]:
    """Finite test family for an order class, anchored on a grid over support"""
    lo, hi = support
    if not lo < hi:
        raise DomainError(f"bank support [{lo}, {hi}] is empty")
    scale = scale or 0.5 * (hi - lo)
    anchors = np.linspace(lo, hi, BANK_ANCHORS)
    rates = [0.25 / scale, 0.5 / scale, 1.0 / scale]
    bank: List[BankFunction] = []

    def add(name, fn, *cuts):
        bank.append(BankFunction(name, fn, tuple(cuts)))

    if order_class == OrderClass.INCREASING:
        add('x', lambda x: x)
        for a in anchors:
            add(f'ramp({a:.4g})', _ramp(a, 0.1 * scale), a, a + 0.1 * scale)
            add(f'(x-{a:.4g})+', _hinge(a), a)
            add(f'-({a:.4g}-x)+', lambda x, a=a: -np.maximum(a - x, 0.0), a)
        for s in rates:
            add(f'exp({s:.4g}x)', lambda x, s=s: np.exp(s * x))
    elif order_class == OrderClass.CONVEX:
        add('x', lambda x: x)
        add('-x', lambda x: -x)
        add('x^2', lambda x: x ** 2)
        for a in anchors:
            add(f'(x-{a:.4g})+', _hinge(a), a)
            add(f'({a:.4g}-x)+', lambda x, a=a: np.maximum(a - x, 0.0), a)
            add(f'|x-{a:.4g}|', lambda x, a=a: np.abs(x - a), a)
        for s in rates:
            add(f'exp({s:.4g}x)', lambda x, s=s: np.exp(s * x))
            add(f'exp(-{s:.4g}x)', lambda x, s=s: np.exp(-s * x))
    elif order_class == OrderClass.INCREASING_CONVEX:
        add('x', lambda x: x)
        for a in anchors:
            add(f'(x-{a:.4g})+', _hinge(a), a)
            add(f'(x-{a:.4g})+^2', _hinge(a, 2), a)
        for s in rates:
            add(f'exp({s:.4g}x)', lambda x, s=s: np.exp(s * x))
    elif order_class == OrderClass.ORDER_3:
        for k in range(3):
            add(f'x^{k}', lambda x, k=k: x ** k)
            add(f'-x^{k}', lambda x, k=k: -x ** k)
        for a in anchors:
            add(f'(x-{a:.4g})+^2', _hinge(a, 2), a)
        for s in rates:
            add(f'exp({s:.4g}x)', lambda x, s=s: np.exp(s * x))
            add(f'-exp(-{s:.4g}x)', lambda x, s=s: -np.exp(-s * x))
    elif order_class == OrderClass.ORDER_4:
        for k in range(4):
            add(f'x^{k}', lambda x, k=k: x ** k)
            add(f'-x^{k}', lambda x, k=k: -x ** k)
        add('x^4', lambda x: x ** 4)
        for a in anchors:
            add(f'(x-{a:.4g})+^3', _hinge(a, 3), a)
        for s in rates:
            add(f'exp({s:.4g}x)', lambda x, s=s: np.exp(s * x))
            add(f'exp(-{s:.4g}x)', lambda x, s=s: np.exp(-s * x))
    return bank


def _law_span(g: Law) -> Tuple[float, float]:
    if isinstance(g, GridDensity):
        return g.support
    return float(g.offset), float(g.offset + len(g.weights) - 1)


def _bank_support(g1: Law, g2: Law, deviation: bool) -> Tuple[float, float]:
    if deviation:
        reach = [abs(e - law_mean(g)) for g in (g1, g2) for e in _law_span(g)]
        return 0.0, max(max(reach), 1e-12)
    (a1, b1), (a2, b2) = _law_span(g1), _law_span(g2)
    lo, hi = min(a1, a2), max(b1, b2)
    return (lo, hi) if hi > lo else (lo - 0.5, hi + 0.5)


def empirical_order_check(g1: Law, g2: Law, bank: OrderClass, tol: float = NUM_TOL,
                          deviation: bool = False) -> OrderCheckReport:
    """Largest relative excess of E f(X1) over E f(X2) across the bank"""
    support = _bank_support(g1, g2, deviation)
    functions = test_bank(bank, support)
    e1 = expectations(g1, functions, deviation)
    e2 = expectations(g2, functions, deviation)
    excess = (e1 - e2) / np.maximum(1.0, np.maximum(np.abs(e1), np.abs(e2)))
    worst = int(np.argmax(excess))
    violation = max(float(excess[worst]), 0.0)
    if violation > tol:
        logger.debug(f"{bank.value} violated by {functions[worst].name}: {violation:.3e}")
    return OrderCheckReport(order_class=bank, max_violation=violation,
                            worst=functions[worst].name if violation > 0 else None,
                            consistent=violation <= tol)


# Certificates
def _moment_gaps(g1: Law, g2: Law, n: int) -> List[Tuple[int, float, float]]:
    """(k, |E1 (X-c)^k - E2 (X-c)^k|, magnitude) for k < n, about c = E X1

    The magnitude of the k-th gap is at least spread^k, spread being the larger
    standard deviation about c.
    """
    c = law_mean(g1)
    order = max(n - 1, 2)
    moms = []
    for g in (g1, g2):
        if isinstance(g, GridDensity):
            moms.append(power_moments(g, order, c) / power_moments(g, 0)[0])
        else:
            x, w = _pmf_arrays(g)
            moms.append(np.array([np.sum((x - c) ** k * w) for k in range(order + 1)]))
    m1, m2 = moms
    spread = float(np.sqrt(max(m1[2], m2[2], 0.0)))
    return [(k, float(abs(m1[k] - m2[k])), float(max(1.0, abs(m1[k]), abs(m2[k]), spread ** k)))
            for k in range(n)]


def certify_order(g1: Law, g2: Law, n: int, tol: float = CERTIFY_DEAD_BAND) -> OrderCertificate:
    """Certify X1 ≺_n X2 from n sign changes and matched moments below order n"""
    if n < 1:
        raise DomainError(f"order must be positive, got {n}")
    if isinstance(g1, GridDensity):
        sup = max(max_density(g1), max_density(g2))
    else:
        sup = max(g1.w.max() / g1.w.sum(), g2.w.max() / g2.w.sum())
    pattern = crossing_pattern(g1, g2, eps=CERTIFY_DEAD_BAND * sup)
    gaps = _moment_gaps(g1, g2, n)
    matched = tuple((k, gap) for k, gap, _ in gaps)
    moments_ok = all(gap <= tol * size for _, gap, size in gaps)

    if pattern.initial_sign == 0:
        return OrderCertificate(order_n=n, crossings=pattern, matched_moments=matched, verdict=Verdict.CERTIFIED)
    if pattern.count == n and pattern.final_sign == 1 and moments_ok:
        return OrderCertificate(order_n=n, crossings=pattern, matched_moments=matched, verdict=Verdict.CERTIFIED)

    check = empirical_order_check(g1, g2, OrderClass.for_order(min(n, 4)), tol=NUM_TOL) if n <= 4 else None
    if check is not None and not check.consistent:
        return OrderCertificate(order_n=n, crossings=pattern, matched_moments=matched, verdict=Verdict.REFUTED,
                                witness=check.worst, max_violation=check.max_violation)
    return OrderCertificate(order_n=n, crossings=pattern, matched_moments=matched, verdict=Verdict.INCONCLUSIVE,
                            max_violation=check.max_violation if check else 0.0)


# Interpolation modulo polynomials
def lagrange_interpolant(f: Callable[[np.ndarray], np.ndarray], nodes: Sequence[float]) -> np.ndarray:
    """Ascending coefficients of the degree < len(nodes) polynomial through f at nodes"""
    x = np.asarray(nodes, dtype=float)
    if x.size == 0:
        raise DomainError("interpolation needs at least one node")
    if np.unique(x).size != x.size:
        raise DomainError(f"interpolation nodes must be distinct, got {list(nodes)}")
    return np.linalg.solve(np.vander(x, increasing=True), np.asarray(f(x), dtype=float))


def sign_product_holds(f: Callable[[np.ndarray], np.ndarray], nodes: Sequence[float], grid: np.ndarray,
                       tol: float = 1e-9) -> bool:
    """(f - P)(x)·Π(x - x_k) >= 0 on grid, P the interpolant of f at nodes"""
    coeffs = lagrange_interpolant(f, nodes)
    grid = np.asarray(grid, dtype=float)
    residual = f(grid) - np.polynomial.polynomial.polyval(grid, coeffs)
    product = residual * np.prod(grid[:, None] - np.asarray(nodes, dtype=float)[None, :], axis=1)
    scale = max(1.0, float(np.max(np.abs(f(grid)))))
    return bool(np.all(product >= -tol * scale))
