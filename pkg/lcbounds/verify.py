"""
Verification suites and the lcbounds command line.

Every suite returns a flat list of InequalityReport records. A record is an
inequality lhs <= rhs evaluated on one instance:

    slack = rhs - lhs,   pass <=> slack >= -num_tol,   equality <=> |slack| <= eq_tol

Two probe flavours reuse the same schema:
1. equality probe: lhs = |slack of the probed instance|, rhs = eq_tol, num_tol = 0
2. strictness probe: lhs = threshold, rhs = slack of the probed instance, num_tol = 0

Suites draw one integer seed per trial from the suite seed, so a trial is a
pure function of its seed and the report is identical whatever the number
of joblib workers.
"""

import json
import logging
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import typer
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field

from .config import DEFAULT_SEED, DEFAULT_TRIALS, EQ_TOL, LOG_FORMAT, LOG_LEVEL, MAX_SUPPORT_LEN, N_JOBS, NUM_TOL
from .config import configure_logging
from .continuous_dists import AsymLaplaceC, interval_overlap, mean_zero_family, tail_superlevel_measure
from .discrete_dists import (
    from_max_and_q, is_asym_laplace_d, make_asym_laplace_d, mean_var_d, sigma4_closed,
    sigma4_derivative, sigma4_series, solve_pq, variance_reparam,
)
from .errors import DomainError, EXIT_MALFORMED, EXIT_OK, EXIT_VIOLATION, LCBoundsError, MalformedInputError
from .extremal import (
    majorant_c, majorant_d, mode_of, variance_point_rhs, variance_point_rhs_d,
)
from .logconcave_gen import (
    ContinuousGenConfig, DiscreteGenConfig, DiscretePMF, GridDensity, exponential_density, gen_logconcave_c,
    gen_logconcave_d, max_density, max_mass, mean, moments_c, moments_d, pdf, read_law_csv,
    render_asym_laplace_c, render_asym_laplace_d, scaled, shifted, uniform_density, write_grid_density_csv,
    write_pmf_csv,
)
from .moments_orlicz import acm_bounds, orlicz_norm, parse_young, power_young, sandwich_bounds, subfactorial
from .moments_orlicz import subfactorial_integral
from .stochastic_orders import OrderClass, Verdict, certify_order, empirical_order_check, sign_product_holds

logger = logging.getLogger(__name__)

SHARP_TOL = 1e-9
STRICT_GAP = 1e-6
GEOMETRIC_EQ_TOL = 1e-12
ROUND_TRIP_TOL = 1e-10
P_LIST = (1.0, 1.5, 2.0, 3.0, 4.0)
ACM_P_LIST = (1.0, 1.5, 2.0, 3.0, 4.0)
T_POINTS = 11
# majorant points lie where f >= e^-LEVEL_DROP max f
LEVEL_DROP = 8.0


# Records
class InequalityReport(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    suite: str
    instance: str
    lhs: float
    rhs: float
    slack: float
    passed: bool = Field(alias='pass')
    equality: bool


class Summary(BaseModel):
    total: int
    failures: int
    equalities: int


class VerificationReport(BaseModel):
    suite: str
    generated_at: Optional[str] = None
    records: List[InequalityReport]
    summary: Summary


class Recorder(BaseModel):
    """Builds records for one suite with its tolerances"""

    model_config = ConfigDict(frozen=True)

    suite: str
    num_tol: float = NUM_TOL
    eq_tol: float = EQ_TOL

    def check(self, instance: str, lhs: float, rhs: float) -> InequalityReport:
        slack = rhs - lhs
        passed = bool(slack >= -self.num_tol)
        equality = bool(abs(slack) <= self.eq_tol) and passed
        return InequalityReport(suite=self.suite, instance=instance, lhs=lhs, rhs=rhs, slack=slack,
                                passed=passed, equality=equality)

    def equality_probe(self, instance: str, slack: float, eq_tol: Optional[float] = None) -> InequalityReport:
        tol = self.eq_tol if eq_tol is None else eq_tol
        passed = bool(abs(slack) <= tol)
        return InequalityReport(suite=self.suite, instance=f"{instance} [equality]", lhs=abs(slack), rhs=tol,
                                slack=tol - abs(slack), passed=passed, equality=passed)

    def strictness_probe(self, instance: str, slack: float, threshold: float) -> InequalityReport:
        return InequalityReport(suite=self.suite, instance=f"{instance} [strict]", lhs=threshold, rhs=slack,
                                slack=slack - threshold, passed=bool(slack >= threshold), equality=False)

    def classified(self, instance: str, lhs: float, rhs: float, expect_equality: bool) -> List[InequalityReport]:
        """The check plus a failing probe when the equality flag disagrees with the expected case"""
        record = self.check(instance, lhs, rhs)
        out = [record]
        if expect_equality and not record.equality:
            out.append(self.equality_probe(instance, record.slack))
        elif record.equality and not expect_equality:
            out.append(self.strictness_probe(instance, record.slack, self.eq_tol))
        return out

    def failure(self, instance: str, detail: str) -> InequalityReport:
        logger.warning(f"{self.suite} {instance}: {detail}")
        return InequalityReport(suite=self.suite, instance=f"{instance} error={detail}", lhs=1.0, rhs=0.0,
                                slack=-1.0, passed=False, equality=False)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _trial_seeds(trials: int, seed: int) -> List[int]:
    return [int(s) for s in np.random.default_rng(seed).integers(0, 2 ** 31 - 1, size=trials)]


def _run_trials(rec: Recorder, trial: Callable[..., List[InequalityReport]], trials: int, seed: int,
                n_jobs: int, **kwargs) -> List[InequalityReport]:
    seeds = _trial_seeds(trials, seed)
    if n_jobs == 1:
        batches = [_guarded(trial, rec, s, **kwargs) for s in seeds]
    else:
        batches = Parallel(n_jobs=n_jobs)(delayed(_guarded)(trial, rec, s, **kwargs) for s in seeds)
    return [r for batch in batches for r in batch]


def _guarded(trial: Callable[..., List[InequalityReport]], rec: Recorder, seed: int,
             **kwargs) -> List[InequalityReport]:
    try:
        return trial(rec, seed, **kwargs)
    except LCBoundsError as e:
        return [rec.failure(f"seed={seed}", e.detail)]


# Random instances
def random_density(seed: int) -> GridDensity:
    """Generated log-concave density with a randomised knot count, window and curvature"""
    rng = np.random.default_rng(seed)
    half = float(rng.uniform(0.5, 4.0))
    center = float(rng.uniform(-2.0, 2.0))
    config = ContinuousGenConfig(knot_count=int(rng.integers(2, 33)), domain=(center - half, center + half),
                                 slope_scale=float(rng.uniform(0.2, 4.0)))
    return gen_logconcave_c(int(rng.integers(0, 2 ** 31 - 1)), config)


def random_pmf(seed: int) -> DiscretePMF:
    rng = np.random.default_rng(seed)
    config = DiscreteGenConfig(support_len=int(rng.integers(1, min(60, MAX_SUPPORT_LEN) + 1)),
                               concavity_scale=float(rng.uniform(0.05, 1.5)))
    return gen_logconcave_d(int(rng.integers(0, 2 ** 31 - 1)), config)


def unit_max(f: GridDensity) -> GridDensity:
    """Rescale so that the maximal density is 1"""
    return scaled(f, max_density(f))


def live_point(rng: np.random.Generator, f: GridDensity) -> float:
    """Uniform point of the superlevel set {f >= e^-LEVEL_DROP max f}, an interval for log-concave f"""
    lo, hi = f.support
    grid = np.linspace(lo, hi, 4097)
    with np.errstate(divide='ignore'):
        live = grid[np.log(pdf(f, grid)) >= np.max(f.logf) - LEVEL_DROP]
    return float(rng.uniform(live[0], live[-1]))


def _is_geometric(g: DiscretePMF) -> bool:
    w = g.w / g.w.sum()
    k = int(np.argmax(w))
    mode = g.offset + k
    if not is_asym_laplace_d(g, mode):
        return False
    left = w[k - 1] if k > 0 else 0.0
    right = w[k + 1] if k + 1 < w.size else 0.0
    return min(left, right) <= 1e-13


# Continuous variance bound at a point
AL_ANCHORS = ((1.0, 1.0, 0.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0), (0.3, 2.0, 1.5), (2.0, 0.5, -1.0))


def _variance_point_trial(rec: Recorder, seed: int) -> List[InequalityReport]:
    f = random_density(seed)
    mu, var, _ = moments_c(f, 2)
    lo, hi = f.support
    out = []
    for k in range(T_POINTS):
        t = lo + (hi - lo) * (k + 0.5) / T_POINTS
        out += rec.classified(f"seed={seed} t={_fmt(t)}", 2 * var, 2 * variance_point_rhs(f, t), False)
    m = mode_of(f)
    out.append(rec.check(f"seed={seed} mode={_fmt(m)}", 2 * var, 1 / max_density(f) ** 2 + (mu - m) ** 2))
    out.append(rec.check(f"seed={seed} at-mean", var * pdf(f, mu) ** 2, 0.5))
    return out


def suite_variance_point(trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, n_jobs: int = N_JOBS,
                         num_tol: float = NUM_TOL, eq_tol: float = EQ_TOL) -> List[InequalityReport]:
    """2 Var(X) <= 1/f(t)^2 + (EX - t)^2, equality only for asymmetric Laplace at its mode"""
    rec = Recorder(suite='variance_point', num_tol=num_tol, eq_tol=eq_tol)
    out: List[InequalityReport] = []
    for l1, l2, m in AL_ANCHORS:
        d = AsymLaplaceC(lambda1=l1, lambda2=l2, mode=m)
        f = render_asym_laplace_c(d)
        mu, var, _ = moments_c(f, 2)
        name = f"asym_laplace({_fmt(l1)},{_fmt(l2)},{_fmt(m)})"
        lhs, rhs = 2 * var, 1 / pdf(f, m) ** 2 + (mu - m) ** 2
        out += rec.classified(f"{name} t=mode", lhs, rhs, True)
        out.append(rec.equality_probe(f"{name} t=mode", rhs - lhs, SHARP_TOL))
        off = m + 0.5 * (l2 if l2 > 0 else -l1)
        out += rec.classified(f"{name} t={_fmt(off)}", lhs, 2 * variance_point_rhs(f, off), False)
    u = uniform_density(0.0, 1.0)
    out += rec.classified("uniform(0,1) t=0.5", 2 * moments_c(u, 2)[1], 2 * variance_point_rhs(u, 0.5), False)
    out += _run_trials(rec, _variance_point_trial, trials, seed, n_jobs)
    return out


# Orlicz sandwich and ACM constants
def _orlicz_trial(rec: Recorder, seed: int, bounds: Dict[float, tuple]) -> List[InequalityReport]:
    f = unit_max(random_density(seed))
    out = []
    for p, (lower, upper) in bounds.items():
        norm = orlicz_norm(f, power_young(p), center=True)
        sigma_p = moments_c(f, p)[2]
        name = f"seed={seed} p={_fmt(p)}"
        out.append(rec.check(f"{name} lower", lower, norm))
        out.append(rec.check(f"{name} upper", norm, upper))
        out.append(rec.check(f"{name} moment-match", abs(norm - sigma_p ** (1 / p)), STRICT_GAP))
    return out


def suite_orlicz_sandwich(trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, n_jobs: int = N_JOBS,
                          num_tol: float = NUM_TOL, eq_tol: float = EQ_TOL,
                          p_list: Sequence[float] = P_LIST) -> List[InequalityReport]:
    """‖U - EU‖ <= ‖X - EX‖ <= ‖Z - EZ‖ for ψ_p at M(X) = 1"""
    rec = Recorder(suite='orlicz_sandwich', num_tol=num_tol, eq_tol=eq_tol)
    bounds = {float(p): sandwich_bounds(1.0, power_young(p)) for p in p_list}
    out: List[InequalityReport] = []
    for p, (lower, upper) in bounds.items():
        acm_lower, acm_upper = acm_bounds(p)
        out.append(rec.equality_probe(f"uniform p={_fmt(p)}", lower - acm_lower ** (1 / p), NUM_TOL))
        out.append(rec.equality_probe(f"exponential p={_fmt(p)}", upper - acm_upper ** (1 / p), NUM_TOL))
    out += _run_trials(rec, _orlicz_trial, trials, seed, n_jobs, bounds=bounds)
    return out


def _acm_trial(rec: Recorder, seed: int, p_list: Sequence[float]) -> List[InequalityReport]:
    f = random_density(seed)
    M = max_density(f)
    out = []
    for p in p_list:
        lower, upper = acm_bounds(p)
        value = M ** p * moments_c(f, p)[2]
        out.append(rec.check(f"seed={seed} p={_fmt(p)} lower", lower, value))
        out.append(rec.check(f"seed={seed} p={_fmt(p)} upper", value, upper))
    return out


def suite_acm(trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, n_jobs: int = N_JOBS,
              num_tol: float = NUM_TOL, eq_tol: float = EQ_TOL,
              p_list: Sequence[float] = ACM_P_LIST) -> List[InequalityReport]:
    """1/(2^p (p+1)) <= M^p σ_p <= Γ(1+p)/e + ∫_0^1 (1-x)^p e^{-x} dx"""
    rec = Recorder(suite='acm', num_tol=num_tol, eq_tol=eq_tol)
    out: List[InequalityReport] = []
    lower2, upper2 = acm_bounds(2)
    out.append(rec.equality_probe("p=2 lower is 1/12", lower2 - 1 / 12, 0.0))
    out.append(rec.equality_probe("p=2 upper is 1", upper2 - 1.0, 0.0))
    for lo, hi in ((-0.5, 0.5), (0.0, 3.0)):
        u = uniform_density(lo, hi)
        for p in p_list:
            value = max_density(u) ** p * moments_c(u, p)[2]
            out.append(rec.equality_probe(f"uniform({_fmt(lo)},{_fmt(hi)}) p={_fmt(p)}", value - acm_bounds(p)[0],
                                          1e-10 if float(p).is_integer() else NUM_TOL))
    for rate in (1.0, 2.5):
        z = exponential_density(rate=rate)
        for p in p_list:
            value = max_density(z) ** p * moments_c(z, p)[2]
            out.append(rec.equality_probe(f"exponential(rate={_fmt(rate)}) p={_fmt(p)}",
                                          value - acm_bounds(p)[1], NUM_TOL))
    out += _run_trials(rec, _acm_trial, trials, seed, n_jobs, p_list=tuple(p_list))
    return out


# Discrete bounds
def _discrete_variance_records(rec: Recorder, name: str, g: DiscretePMF) -> List[InequalityReport]:
    mu, var, _ = moments_d(g)
    out = []
    for n in g.support:
        if g.prob(int(n)) <= 0:
            continue
        out += rec.classified(f"{name} n={n}", 2 * var, 2 * variance_point_rhs_d(g, int(n)),
                              is_asym_laplace_d(g, int(n)))
    nearest = int(np.floor(mu + 0.5))
    out.append(rec.check(f"{name} nearest-integer", g.prob(nearest) ** 2, 1 / (0.75 + 2 * var)))
    if abs(mu - nearest) <= 1e-12:
        out.append(rec.check(f"{name} integer-mean", g.prob(nearest) ** 2, 1 / (1 + 2 * var)))
    return out


def _discrete_variance_trial(rec: Recorder, seed: int) -> List[InequalityReport]:
    rng = np.random.default_rng(seed)
    out = _discrete_variance_records(rec, f"seed={seed}", random_pmf(seed))

    p, q = (float(v) for v in rng.uniform(0.0, 0.9, 2))
    mode = int(rng.integers(-5, 6))
    d = make_asym_laplace_d(p, q, mode)
    mu = mean_var_d(d)[0]
    p2, q2 = solve_pq(d.normalizer, mu - mode)
    name = f"seed={seed} asym_laplace({_fmt(p)},{_fmt(q)},{mode})"
    out.append(rec.check(f"{name} solve_pq round-trip", max(abs(p2 - p), abs(q2 - q)), ROUND_TRIP_TOL))

    g = render_asym_laplace_d(d)
    g_var = moments_d(g)[1]
    slack = 2 * variance_point_rhs_d(g, mode) - 2 * g_var
    out += rec.classified(f"{name} n=mode", 2 * g_var, 2 * variance_point_rhs_d(g, mode), True)
    out.append(rec.equality_probe(f"{name} n=mode", slack, ROUND_TRIP_TOL))

    # leave the family while staying log-concave
    bent = DiscretePMF(offset=g.offset, weights=tuple(g.w * np.exp(-1e-3 * (g.support - mode) ** 2))).normalized()
    bent_slack = 2 * variance_point_rhs_d(bent, mode) - 2 * moments_d(bent)[1]
    out.append(rec.strictness_probe(f"{name} perturbed", bent_slack, max(slack, 0.0)))
    return out


def suite_discrete_variance_point(trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, n_jobs: int = N_JOBS,
                                  num_tol: float = NUM_TOL, eq_tol: float = EQ_TOL) -> List[InequalityReport]:
    """2 Var(Y) <= 1/P(Y=n)^2 - 1 + (EY - n)^2 and the nearest-integer corollaries"""
    rec = Recorder(suite='discrete_variance_point', num_tol=num_tol, eq_tol=eq_tol)
    out: List[InequalityReport] = []
    out += _discrete_variance_records(rec, "point-mass", DiscretePMF(offset=3, weights=(1.0,)))
    out += _discrete_variance_records(rec, "fair-coin", DiscretePMF(offset=0, weights=(0.5, 0.5)))
    out += _run_trials(rec, _discrete_variance_trial, trials, seed, n_jobs)
    return out


def _max_records(rec: Recorder, name: str, g: DiscretePMF, expect_equality: bool) -> List[InequalityReport]:
    M = max_mass(g)
    _, var, sigma4 = moments_d(g, 4)
    out = rec.classified(f"{name} variance", M ** 2 * var + M, 1.0, expect_equality)
    out += rec.classified(f"{name} fourth", M ** 4 * sigma4 + M * (M ** 2 - 10 * M + 18), 9.0, expect_equality)
    return out


def _discrete_max_trial(rec: Recorder, seed: int) -> List[InequalityReport]:
    rng = np.random.default_rng(seed)
    g = random_pmf(seed)
    out = _max_records(rec, f"seed={seed}", g, _is_geometric(g))

    p, q = (float(v) for v in rng.uniform(0.05, 0.9, 2))
    al = render_asym_laplace_d(make_asym_laplace_d(p, q, int(rng.integers(-5, 6))))
    M = max_mass(al)
    _, var, sigma4 = moments_d(al, 4)
    name = f"seed={seed} asym_laplace({_fmt(p)},{_fmt(q)})"
    out += _max_records(rec, name, al, False)
    out.append(rec.strictness_probe(f"{name} variance", 1 - M ** 2 * var - M, STRICT_GAP))
    out.append(rec.strictness_probe(f"{name} fourth", 9 - M ** 4 * sigma4 - M * (M ** 2 - 10 * M + 18), STRICT_GAP))
    return out


def suite_discrete_max(trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, n_jobs: int = N_JOBS,
                       num_tol: float = NUM_TOL, eq_tol: float = EQ_TOL) -> List[InequalityReport]:
    """M^2 Var + M <= 1 and M^4 σ_4 + M(M^2 - 10M + 18) <= 9, equality for geometric laws only"""
    rec = Recorder(suite='discrete_max', num_tol=num_tol, eq_tol=eq_tol)
    out: List[InequalityReport] = []
    out += _max_records(rec, "point-mass", DiscretePMF(offset=0, weights=(1.0,)), True)
    for q in np.linspace(0.1, 0.9, 9):
        for p_, q_ in ((0.0, float(q)), (float(q), 0.0)):
            g = render_asym_laplace_d(make_asym_laplace_d(p_, q_, mode=2))
            name = f"geometric(p={_fmt(p_)},q={_fmt(q_)})"
            out += _max_records(rec, name, g, True)
            M = max_mass(g)
            _, var, sigma4 = moments_d(g, 4)
            out.append(rec.equality_probe(f"{name} variance", 1 - M ** 2 * var - M, GEOMETRIC_EQ_TOL))
            out.append(rec.equality_probe(f"{name} fourth", 9 - M ** 4 * sigma4 - M * (M ** 2 - 10 * M + 18),
                                          GEOMETRIC_EQ_TOL))
    out += _run_trials(rec, _discrete_max_trial, trials, seed, n_jobs)
    return out


# Order machinery
def _certificate_records(rec: Recorder, name: str, g1, g2, n: int) -> List[InequalityReport]:
    cert = certify_order(g1, g2, n)
    out = [rec.check(f"{name} certified", 0.0 if cert.verdict == Verdict.CERTIFIED else 1.0, 0.0)]
    if cert.verdict == Verdict.CERTIFIED:
        check = empirical_order_check(g1, g2, OrderClass.for_order(n))
        out.append(rec.check(f"{name} bank", check.max_violation, 0.0))
    return out


def _order_trial(rec: Recorder, seed: int) -> List[InequalityReport]:
    rng = np.random.default_rng(seed)
    f = random_density(seed)
    lo, hi = f.support
    t = live_point(rng, f)
    d = majorant_c(f, t, diagnostic=True)
    x = render_asym_laplace_c(d)
    out = _certificate_records(rec, f"seed={seed} majorant t={_fmt(t)}", f, x, 2)
    out.append(rec.strictness_probe(f"seed={seed} rigidity", moments_c(x, 2)[1] - moments_c(f, 2)[1], 1e-12))

    delta = float(rng.uniform(0.05, 1.0)) * (hi - lo)
    out += _certificate_records(rec, f"seed={seed} shift={_fmt(delta)}", f, shifted(f, delta), 1)

    g = random_pmf(seed)
    n = int(g.offset + np.argmax(g.w))
    out += _certificate_records(rec, f"seed={seed} discrete-majorant n={n}", g,
                                render_asym_laplace_d(majorant_d(g, n)), 2)

    a, b = (float(v) for v in rng.uniform(0.0, 3.0, 2))
    z = float(rng.uniform(-7.0, 7.0))
    direct = max(0.0, min(a, z + b) - max(-a, z - b))
    out.append(rec.check(f"seed={seed} overlap a={_fmt(a)} b={_fmt(b)} x={_fmt(z)}",
                         abs(interval_overlap(a, b, z) - direct), 1e-12))

    k = int(rng.integers(1, 5))
    nodes = np.sort(rng.uniform(-1.0, 1.0, k))
    grid = np.linspace(-1.5, 1.5, 10001)
    anchor = float(rng.uniform(-1.0, 1.0))
    samples = [('exp', np.exp)]
    if k >= 2:
        samples.append((f'(x-{_fmt(anchor)})+^{k - 1}', lambda v: np.maximum(v - anchor, 0.0) ** (k - 1)))
    if k in (2, 4):
        samples.append(('x^4', lambda v: v ** 4))
    for label, fn in samples:
        holds = sign_product_holds(fn, nodes, grid)
        out.append(rec.check(f"seed={seed} interpolant {label} nodes={k}", 0.0 if holds else 1.0, 0.0))
    return out


def _extremality_records(rec: Recorder) -> List[InequalityReport]:
    M = 1.0
    grid = np.linspace(0.0, 1.0 / M, 101)
    out = []
    for a in (0.1, 0.25, 0.5, 1.0, 2.0):
        for level in (0.05, 0.2, 0.5, 0.9):
            t = level * M
            measures = np.array([tail_superlevel_measure(mean_zero_family(M, l2), a, t) for l2 in grid])
            name = f"tail-superlevel a={_fmt(a)} t={_fmt(t)}"
            out.append(rec.check(f"{name} min at 1/(2M)", measures[50], measures.min()))
            out.append(rec.check(f"{name} max at ends", measures.max(), max(measures[0], measures[-1])))
    return out


def suite_order_machinery(trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, n_jobs: int = N_JOBS,
                          num_tol: float = NUM_TOL, eq_tol: float = EQ_TOL) -> List[InequalityReport]:
    """Certificates agree with test banks; extremality of the mean-zero family; overlap formula"""
    rec = Recorder(suite='order_machinery', num_tol=num_tol, eq_tol=eq_tol)
    out = _extremality_records(rec)
    u = uniform_density()
    out += _certificate_records(rec, "uniform vs unit shift", u, shifted(u, 1.0), 1)
    out += _run_trials(rec, _order_trial, trials, seed, n_jobs)
    return out


# Increasing chain of absolute deviations
def _chain_trial(rec: Recorder, seed: int, u: GridDensity, z: GridDensity) -> List[InequalityReport]:
    f = unit_max(random_density(seed))
    centered = shifted(f, -mean(f))
    checks = [
        ('|U-EU| <1 |X-EX|', u, f, OrderClass.INCREASING, True),
        ('U <cx X-EX', u, centered, OrderClass.CONVEX, False),
        ('|X-EX| <icx |Z-EZ|', f, z, OrderClass.INCREASING_CONVEX, True),
    ]
    return [rec.check(f"seed={seed} {label}", empirical_order_check(g1, g2, cls, deviation=dev).max_violation, 0.0)
            for label, g1, g2, cls, dev in checks]


def suite_increasing_chain(trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, n_jobs: int = N_JOBS,
                           num_tol: float = NUM_TOL, eq_tol: float = EQ_TOL) -> List[InequalityReport]:
    """|U-EU| <1 |S-ES| <1 |X_λ-EX_λ| <1 |Z-EZ| at equal maximum, and the bounds for generated X"""
    rec = Recorder(suite='increasing_chain', num_tol=num_tol, eq_tol=eq_tol)
    u = uniform_density()
    s = render_asym_laplace_c(AsymLaplaceC(lambda1=0.5, lambda2=0.5))
    z = exponential_density()
    out: List[InequalityReport] = []
    out.append(rec.check("|U-EU| <1 |S-ES|", empirical_order_check(u, s, OrderClass.INCREASING,
                                                                  deviation=True).max_violation, 0.0))
    for l2 in np.linspace(0.0, 1.0, 11):
        x = render_asym_laplace_c(mean_zero_family(1.0, float(l2)))
        for label, g1, g2 in ((f"|S-ES| <1 |X-EX| lambda2={_fmt(l2)}", s, x),
                              (f"|X-EX| <1 |Z-EZ| lambda2={_fmt(l2)}", x, z)):
            violation = empirical_order_check(g1, g2, OrderClass.INCREASING, deviation=True).max_violation
            out.append(rec.check(label, violation, 0.0))
    out += _run_trials(rec, _chain_trial, trials, seed, n_jobs, u=u, z=z)
    return out


# Deterministic machinery
def suite_sigma4(num_tol: float = NUM_TOL, eq_tol: float = EQ_TOL) -> List[InequalityReport]:
    """Closed-form σ_4 against series, its derivative against differences, sign and root"""
    rec = Recorder(suite='sigma4', num_tol=num_tol, eq_tol=eq_tol)
    out: List[InequalityReport] = []
    h = 1e-6
    for M in np.linspace(0.05, 0.95, 20):
        q_max = (1 - M) / (1 + M)
        name = f"M={_fmt(M)}"
        for q in np.linspace(0.0, q_max, 20):
            closed = sigma4_closed(M, q)
            series = sigma4_series(from_max_and_q(M, q))
            out.append(rec.check(f"{name} q={_fmt(q)} series", abs(closed - series) / max(1.0, series), SHARP_TOL))
        for q in np.linspace(2 * h, q_max - 2 * h, 20):
            deriv = sigma4_derivative(M, q)
            central = (sigma4_closed(M, q + h) - sigma4_closed(M, q - h)) / (2 * h)
            scale = 36.0 / (M ** 3 * (1 - q) ** 2)
            out.append(rec.check(f"{name} q={_fmt(q)} derivative", abs(deriv - central) / scale, STRICT_GAP))
            if q < q_max - 4 * h:
                out.append(rec.strictness_probe(f"{name} q={_fmt(q)} decreasing", -deriv, 0.0))
        root_scale = 36.0 / (M ** 3 * (1 - q_max) ** 2)
        out.append(rec.equality_probe(f"{name} root", sigma4_derivative(M, q_max) / root_scale, SHARP_TOL))
        out.append(rec.equality_probe(f"{name} geometric variance", M ** 2 * variance_reparam(M, 0.0) + M - 1,
                                      1e-14))
        out.append(rec.equality_probe(f"{name} geometric fourth",
                                      M ** 4 * sigma4_closed(M, 0.0) + M * (M ** 2 - 10 * M + 18) - 9,
                                      GEOMETRIC_EQ_TOL))
    return out


def suite_subfactorial(num_tol: float = NUM_TOL, eq_tol: float = EQ_TOL) -> List[InequalityReport]:
    """Exact subfactorials against the integral form and the ACM upper constants"""
    rec = Recorder(suite='subfactorial', num_tol=num_tol, eq_tol=eq_tol)
    out: List[InequalityReport] = []
    for n, expected in ((2, 1), (3, 2), (4, 9)):
        out.append(rec.equality_probe(f"!{n} = {expected}", float(subfactorial(n) - expected), 0.0))
    for n in range(13):
        exact = subfactorial(n)
        out.append(rec.equality_probe(f"!{n} integral", (subfactorial_integral(n) - exact) / max(1, exact),
                                      SHARP_TOL))
        if n >= 1:
            upper = acm_bounds(n)[1]
            if n % 2 == 0:
                out.append(rec.equality_probe(f"acm upper p={n} is !{n}", upper - exact, 0.0))
            else:
                z = exponential_density(shift=-1.0, weight_power=n + 1)
                moment = moments_c(z, n)[2]
                out.append(rec.equality_probe(f"acm upper p={n} is E|Z-1|^{n}", (upper - moment) / upper, SHARP_TOL))
    return out


SUITES: Dict[str, Callable[..., List[InequalityReport]]] = {
    'variance_point': suite_variance_point,
    'orlicz_sandwich': suite_orlicz_sandwich,
    'acm': suite_acm,
    'discrete_variance_point': suite_discrete_variance_point,
    'discrete_max': suite_discrete_max,
    'order_machinery': suite_order_machinery,
    'increasing_chain': suite_increasing_chain,
    'sigma4': lambda trials, seed, n_jobs, num_tol, eq_tol: suite_sigma4(num_tol, eq_tol),
    'subfactorial': lambda trials, seed, n_jobs, num_tol, eq_tol: suite_subfactorial(num_tol, eq_tol),
}


def run_suite(name: str, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, n_jobs: int = N_JOBS,
              num_tol: float = NUM_TOL, eq_tol: float = EQ_TOL) -> List[InequalityReport]:
    names = list(SUITES) if name == 'all' else [name]
    records: List[InequalityReport] = []
    for suite in names:
        if suite not in SUITES:
            raise MalformedInputError(f"unknown suite '{suite}', expected one of: all, {', '.join(SUITES)}")
        batch = SUITES[suite](trials, seed, n_jobs, num_tol, eq_tol)
        failures = sum(not r.passed for r in batch)
        logger.info(f"suite {suite}: {len(batch)} records, {failures} failures, "
                    f"{sum(r.equality for r in batch)} equalities")
        records += batch
    return records


def build_report(suite: str, records: List[InequalityReport], reproducible: bool = False) -> VerificationReport:
    summary = Summary(total=len(records), failures=sum(not r.passed for r in records),
                      equalities=sum(r.equality for r in records))
    stamp = None if reproducible else datetime.now(timezone.utc).isoformat()
    return VerificationReport(suite=suite, generated_at=stamp, records=records, summary=summary)


def report_json(report: VerificationReport) -> str:
    return json.dumps(report.model_dump(by_alias=True), indent=2)


def report_csv(report: VerificationReport) -> str:
    rows = [r.model_dump(by_alias=True) for r in report.records]
    columns = ['suite', 'instance', 'lhs', 'rhs', 'slack', 'pass', 'equality']
    return pd.DataFrame(rows, columns=columns).to_csv(index=False)


# Command line
class ReportFormat(str, Enum):
    json = 'json'
    csv = 'csv'


class LawKind(str, Enum):
    c = 'c'
    d = 'd'


# base of every usage error, whichever click build typer runs on
USAGE_ERROR = next(c for c in typer.BadParameter.__mro__ if c.__name__ == 'ClickException')

app = typer.Typer(add_completion=False, no_args_is_help=True,
                  help="Verify sharp anti-concentration bounds for log-concave laws.")


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        typer.echo(text, nl=not text.endswith('\n'))
    else:
        out.write_text(text)


@app.command('verify')
def verify_command(
    suite: str = typer.Argument(..., help="Suite name or 'all'"),
    trials: int = typer.Option(DEFAULT_TRIALS, '--trials', min=0),
    seed: int = typer.Option(DEFAULT_SEED, '--seed'),
    tol: float = typer.Option(NUM_TOL, '--tol', min=0.0, help="Violation threshold num_tol"),
    fmt: ReportFormat = typer.Option(ReportFormat.json, '--format'),
    out: Optional[Path] = typer.Option(None, '--out'),
    reproducible: bool = typer.Option(False, '--reproducible', help="Omit the timestamp"),
    log_level: str = typer.Option(LOG_LEVEL, '--log-level'),
    jobs: int = typer.Option(N_JOBS, '--jobs'),
):
    """Run a verification suite and write its report"""
    configure_logging(log_level, LOG_FORMAT)
    records = run_suite(suite, trials=trials, seed=seed, n_jobs=jobs, num_tol=tol, eq_tol=min(EQ_TOL, tol))
    report = build_report(suite, records, reproducible)
    _emit(report_json(report) if fmt == ReportFormat.json else report_csv(report), out)
    if report.summary.failures:
        logger.warning(f"{report.summary.failures} of {report.summary.total} checks failed")
        raise typer.Exit(code=EXIT_VIOLATION)
    raise typer.Exit(code=EXIT_OK)


@app.command('majorize')
def majorize_command(
    input_path: Path = typer.Option(..., '--input', help="CSV with header x,logf or n,p"),
    point: float = typer.Option(..., '--point', help="t for a density, n for a pmf"),
    log_level: str = typer.Option(LOG_LEVEL, '--log-level'),
):
    """Build the extremal asymmetric Laplace majorant at a point"""
    configure_logging(log_level, LOG_FORMAT)
    law = read_law_csv(input_path)
    if isinstance(law, GridDensity):
        d = majorant_c(law, point, diagnostic=True)
        cert = certify_order(law, render_asym_laplace_c(d), 2)
        variance = moments_c(law, 2)[1]
        payload = {'kind': 'continuous', 'point': point, 'lambda1': d.lambda1, 'lambda2': d.lambda2,
                   'mode': d.mode, 'variance': variance, 'bound': variance_point_rhs(law, point)}
    else:
        if not float(point).is_integer():
            raise MalformedInputError(f"--point must be an integer for a pmf, got {point}")
        n = int(point)
        d = majorant_d(law, n)
        cert = certify_order(law, render_asym_laplace_d(d), 2)
        variance = moments_d(law)[1]
        payload = {'kind': 'discrete', 'point': n, 'p': d.p, 'q': d.q, 'mode': d.mode,
                   'variance': variance, 'bound': variance_point_rhs_d(law, n)}
    payload['verdict'] = cert.verdict.value
    payload['crossings'] = list(cert.crossings.crossings)
    typer.echo(json.dumps(payload, indent=2))
    raise typer.Exit(code=EXIT_OK if variance <= payload['bound'] + NUM_TOL else EXIT_VIOLATION)


@app.command('orlicz')
def orlicz_command(
    input_path: Path = typer.Option(..., '--input', help="CSV with header x,logf or n,p"),
    psi: str = typer.Option('p=2', '--psi', help="p=<p> or exp"),
    center: bool = typer.Option(False, '--center', help="Norm of W - EW"),
    log_level: str = typer.Option(LOG_LEVEL, '--log-level'),
):
    """Orlicz norm of a law read from CSV"""
    configure_logging(log_level, LOG_FORMAT)
    law = read_law_csv(input_path)
    try:
        young = parse_young(psi)
    except DomainError as e:
        raise MalformedInputError(f"--psi: {e.detail}")
    typer.echo(json.dumps({'psi': young.descriptor, 'center': center,
                           'norm': orlicz_norm(law, young, center=center)}, indent=2))
    raise typer.Exit(code=EXIT_OK)


@app.command('gen')
def gen_command(
    kind: LawKind = typer.Option(..., '--kind', help="c for a density, d for a pmf"),
    seed: int = typer.Option(DEFAULT_SEED, '--seed'),
    out: Optional[Path] = typer.Option(None, '--out'),
):
    """Write a generated log-concave law as CSV"""
    if kind == LawKind.c:
        text = write_grid_density_csv(gen_logconcave_c(seed))
    else:
        text = write_pmf_csv(gen_logconcave_d(seed))
    _emit(text, out)
    raise typer.Exit(code=EXIT_OK)


def cli_main(args: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code instead of exiting"""
    command = typer.main.get_command(app)
    try:
        rv = command.main(args=args, prog_name='lcbounds', standalone_mode=False)
    except typer.Exit as e:
        return e.exit_code
    except USAGE_ERROR as e:
        e.show()
        return EXIT_MALFORMED
    except typer.Abort:
        return EXIT_VIOLATION
    except LCBoundsError as e:
        logger.error(e.detail)
        return e.exit_code
    return rv if isinstance(rv, int) else EXIT_OK
