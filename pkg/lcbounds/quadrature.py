"""
Numerical integration helpers shared by the distribution modules.

Two tools are provided:
1. ``integrate``: adaptive quadrature (QUADPACK through scipy) split at
   caller supplied breakpoints, with the package tolerances.
2. ``composite_rule``: a fixed composite Gauss-Legendre rule over a set of
   cells, for expectations that are evaluated many times against the same
   density (Orlicz bisection, test-function banks).
"""

import logging
from functools import lru_cache
from typing import Callable, Iterable, Optional, Tuple

import numpy as np
from scipy import integrate as sp_integrate

from .config import QUAD_ABS_TOL, QUAD_REL_TOL
from .errors import NumericalError

logger = logging.getLogger(__name__)

GL_ORDER = 16


def integrate(func: Callable[[float], float], lo: float, hi: float,
              points: Optional[Iterable[float]] = None,
              abs_tol: float = QUAD_ABS_TOL, rel_tol: float = QUAD_REL_TOL,
              limit: int = 200) -> float:
    """Integrate func over [lo, hi] (bounds may be infinite), split at points"""
    if hi < lo:
        return -integrate(func, hi, lo, points, abs_tol, rel_tol, limit)
    cuts = sorted({float(p) for p in (points if points is not None else ()) if lo < p < hi})
    edges = [lo] + cuts + [hi]

    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if a == b:
            continue
        out = sp_integrate.quad(func, a, b, epsabs=abs_tol, epsrel=rel_tol,
                                limit=limit, full_output=1)
        value, abserr = out[0], out[1]
        if len(out) > 3 and abserr > max(abs_tol, rel_tol * abs(value)) * 100:
            # ier > 0 and the error estimate is genuinely off target
            raise NumericalError(f"quadrature on [{a}, {b}] did not converge: {out[3]}")
        total += value
    return total


@lru_cache(maxsize=8)
def _leggauss(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def composite_rule(edges: np.ndarray, order: int = GL_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a Gauss-Legendre rule on every cell of sorted edges"""
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return np.empty(0), np.empty(0)
    ref_nodes, ref_weights = _leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * ref_nodes[None, :]
    weights = half[:, None] * ref_weights[None, :]
    return nodes.ravel(), weights.ravel()


def refine_edges(edges: np.ndarray, max_width: np.ndarray) -> np.ndarray:
    """Split each cell [e_i, e_i+1] into equal parts no wider than max_width[i]"""
    edges = np.asarray(edges, dtype=float)
    out = [edges[:1]]
    for a, b, w in zip(edges[:-1], edges[1:], max_width):
        parts = 1 if not np.isfinite(w) or w <= 0 else int(np.ceil((b - a) / w))
        parts = max(1, min(parts, 4096))
        out.append(np.linspace(a, b, parts + 1)[1:])
    return np.concatenate(out)
