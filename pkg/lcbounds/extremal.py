"""
Extremal asymmetric Laplace majorants.

Given a log-concave law and a point t with positive density, there is an
asymmetric Laplace law with mode t that matches the density at t and the
mean, and that dominates the input in the convex order. Its variance gives
the sharp bound 2 Var(X) <= 1/f(t)^2 + (EX - t)^2 (and the discrete analogue
2 Var(Y) <= 1/P(Y=n)^2 - 1 + (EY - n)^2).
"""

import logging

import numpy as np
from scipy import optimize

from .continuous_dists import AsymLaplaceC, mean_var
from .discrete_dists import AsymLaplaceD, make_asym_laplace_d, solve_pq
from .errors import DomainError, NotLogConcaveError, NumericalError, UnboundedMajorantError
from .logconcave_gen import DiscretePMF, GridDensity, mean, moments_d, pdf, require_logconcave

logger = logging.getLogger(__name__)

SCALE_SLACK = 1e-12
ORACLE_TOL = 1e-9


def _density_at(f: GridDensity, t: float) -> float:
    ft = pdf(f, t)
    if ft <= 0:
        raise UnboundedMajorantError(f"density vanishes at t = {t}; the bound is vacuous there")
    return ft


def majorant_c(f: GridDensity, t: float, diagnostic: bool = False) -> AsymLaplaceC:
    """Asymmetric Laplace with mode t, density f(t) at t and the mean of f"""
    require_logconcave(f)
    ft = _density_at(f, t)
    width = 1.0 / ft
    shift = mean(f) - t
    lambda2 = 0.5 * (width + shift)
    lambda1 = 0.5 * (width - shift)
    if min(lambda1, lambda2) < -SCALE_SLACK * width:
        raise NotLogConcaveError(f"|mean - t| = {abs(shift)} exceeds 1/f(t) = {width}")
    d = AsymLaplaceC(lambda1=max(lambda1, 0.0), lambda2=max(lambda2, 0.0), mode=t)
    if diagnostic:
        oracle = majorant_c_bisection(f, t)
        gap = max(abs(oracle.lambda1 - d.lambda1), abs(oracle.lambda2 - d.lambda2))
        if gap > ORACLE_TOL * max(1.0, width):
            raise NumericalError(f"closed-form majorant disagrees with bisection by {gap}")
    return d


def majorant_c_bisection(f: GridDensity, t: float) -> AsymLaplaceC:
    """Same majorant found by bisecting s -> E X_(s, 1/f(t) - s) - t against EX - t"""
    ft = _density_at(f, t)
    width = 1.0 / ft
    target = mean(f) - t

    def member(s: float) -> AsymLaplaceC:
        return AsymLaplaceC(lambda1=s, lambda2=width - s, mode=t)

    def excess(s: float) -> float:
        return mean_var(member(s))[0] - t - target

    at_lo, at_hi = excess(0.0), excess(width)
    if abs(at_lo) <= SCALE_SLACK * width:
        return member(0.0)
    if abs(at_hi) <= SCALE_SLACK * width:
        return member(width)
    if at_lo * at_hi > 0:
        raise NotLogConcaveError(f"no mean match on [0, {width}]: EX - t = {target}")
    s = optimize.bisect(excess, 0.0, width, xtol=1e-15 * width, maxiter=200)
    return member(s)


def majorant_d(g: DiscretePMF, n: int) -> AsymLaplaceD:
    """Discrete asymmetric Laplace with mode n matching g(n) and the mean of g"""
    g = g.normalized()
    require_logconcave(g)
    gn = g.prob(n)
    if gn <= 0:
        raise UnboundedMajorantError(f"pmf vanishes at n = {n}")
    mu = moments_d(g)[0]
    p, q = solve_pq(gn, mu - n)
    return make_asym_laplace_d(p, q, mode=n)


def variance_point_rhs(f: GridDensity, t: float) -> float:
    """½(1/f(t)^2 + (EX - t)^2), the variance of the majorant at t"""
    ft = _density_at(f, t)
    return 0.5 * (1.0 / ft ** 2 + (mean(f) - t) ** 2)


def variance_point_rhs_d(g: DiscretePMF, n: int) -> float:
    """½(1/P(Y=n)^2 - 1 + (EY - n)^2)"""
    g = g.normalized()
    gn = g.prob(n)
    if gn <= 0:
        raise UnboundedMajorantError(f"pmf vanishes at n = {n}")
    return 0.5 * (1.0 / gn ** 2 - 1.0 + (moments_d(g)[0] - n) ** 2)


def mode_of(f: GridDensity) -> float:
    """A point where f attains its maximum (always a knot)"""
    return float(f.x[int(np.argmax(f.logf))])


def fixed_max_variance_maximizer(M: float) -> AsymLaplaceD:
    """Geometric law with maximum M, the variance and σ₄ maximiser up to reflection"""
    if not 0 < M <= 1:
        raise DomainError(f"maximum must lie in (0, 1], got {M}")
    return make_asym_laplace_d(0.0, 1.0 - M)
