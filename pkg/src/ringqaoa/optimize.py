"""Minimisation of the residual-energy landscape.

BFGS with a dense inverse-Hessian and a strong-Wolfe line search, random
multistart, the iterative "regular" construction that re-initialises each
depth from the previous solution, and clustering of degenerate minima.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import line_search

from .pseudospin import (
    HALF_PI,
    AngleSchedule,
    DomainError,
    residual_and_gradient,
    residual_bound,
    residual_energy,
    symmetry_transform,
)
from .schedules import ContinuousSchedule, digitize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    gradient_tolerance: float = 1e-10
    bound_gap_tolerance: float = 1e-7
    max_iterations: int = 20000
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    rng_seed: int = 0
    # cap on the max-norm of a single step; None leaves the line search free
    max_step: float | None = None

    def __post_init__(self):
        if not 0.0 < self.wolfe_c1 < self.wolfe_c2 < 1.0:
            raise ValueError(f"need 0 < c1 < c2 < 1, got c1={self.wolfe_c1}, c2={self.wolfe_c2}")
        if self.gradient_tolerance <= 0 or self.bound_gap_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.max_step is not None and not self.max_step > 0:
            raise ValueError("max_step must be positive")


@dataclass(frozen=True)
class OptimResult:
    schedule: AngleSchedule
    residual: float
    iterations: int
    converged: bool
    total_time_tau: float
    gradient_norm: float = float("nan")
    message: str = ""

    @property
    def P(self) -> int:
        return self.schedule.P


def rng_from_seed(seed: int) -> np.random.Generator:
    """Counter-based generator shared by every stochastic routine."""
    return np.random.Generator(np.random.Philox(int(seed) & (2**64 - 1)))


def _result(N, x, f, g, it, converged, message):
    sched = AngleSchedule.from_vector(x)
    return OptimResult(sched, f, it, converged, sched.total_time, float(np.linalg.norm(g)), message)


def bfgs_minimize(N: int, init: AngleSchedule, cfg: OptimizerConfig = OptimizerConfig(),
                  halt_on_bound: bool = True) -> OptimResult:
    """Quasi-Newton descent on the residual energy of the ``N``-site ring.

    Stops when the gradient norm drops below ``cfg.gradient_tolerance`` or,
    with ``halt_on_bound``, when the residual is within
    ``cfg.bound_gap_tolerance`` of the analytic lower bound.
    """
    x = init.as_vector().copy()
    if not np.all(np.isfinite(x)):
        raise DomainError("initial point must be finite")
    n = x.size
    bound = residual_bound(N, init.P)

    cache = {}

    def evaluate(y):
        key = y.tobytes()
        if key not in cache:
            cache.clear()
            cache[key] = residual_and_gradient(N, AngleSchedule.from_vector(y))
        return cache[key]

    def fun(y):
        return evaluate(y)[0]

    def grad(y):
        return evaluate(y)[1]

    f, g = residual_and_gradient(N, init)
    f_init = f
    H = np.eye(n)
    fresh = True
    scale = None  # latest curvature estimate s.y / y.y
    probed = False
    it = 0
    while True:
        gnorm = np.linalg.norm(g)
        if gnorm < cfg.gradient_tolerance:
            return _result(N, x, f, g, it, True, "gradient tolerance reached")
        if halt_on_bound and f - bound < cfg.bound_gap_tolerance:
            return _result(N, x, f, g, it, True, "bound gap tolerance reached")
        if it >= cfg.max_iterations:
            return _result(N, x, f, g, it, False, "max_iterations exhausted")

        d = -H @ g
        if g @ d >= 0:
            H = (scale or 1.0) * np.eye(n)
            d = -H @ g
            fresh = True
        amax = None if cfg.max_step is None else cfg.max_step / np.max(np.abs(d))
        with warnings.catch_warnings():
            # a failed search is handled below; scipy's warning adds nothing
            warnings.filterwarnings("ignore", message="The line search algorithm")
            alpha, _, _, f_new, _, g_new = line_search(
                fun, grad, x, d, gfk=g, old_fval=f, c1=cfg.wolfe_c1, c2=cfg.wolfe_c2, amax=amax, maxiter=50
            )
        if alpha is None or g_new is None or f_new > f:
            # near the minimum f stops resolving the decrease; accept the
            # quasi-Newton step if it shrinks the gradient without raising f
            # beyond rounding
            step = 1.0 if cfg.max_step is None else min(1.0, amax)
            d = step * d
            f_try, g_try = evaluate(x + d)
            if f_try <= min(f + 8 * np.finfo(float).eps * abs(f), f_init) and np.linalg.norm(g_try) < 0.9 * gnorm:
                alpha, f_new, g_new = 1.0, f_try, g_try
            elif fresh and not probed:
                # rescale steepest descent with a curvature probe along -g
                probed = True
                h = -1e-4 * g / gnorm
                y = grad(x + h) - g
                if h @ y > 0:
                    scale = (h @ y) / (y @ y)
                    H = scale * np.eye(n)
                continue
            elif fresh:
                # steepest descent already failed: we are at the floating-point floor
                at_bound = f - bound < cfg.bound_gap_tolerance
                return _result(N, x, f, g, it, at_bound,
                               "line search stalled at the bound" if at_bound else "line search failed")
            else:
                H = (scale or 1.0) * np.eye(n)
                fresh = True
                continue
        s = alpha * d
        x = x + s
        y = g_new - g
        f, g = f_new, g_new
        it += 1
        sy = s @ y
        if sy > 1e-300:
            scale = sy / (y @ y)
            probed = False
            if fresh:
                # Nocedal-Wright initial scaling before the first update
                H = (sy / (y @ y)) * np.eye(n)
            rho = 1.0 / sy
            Hy = H @ y
            H = H - rho * (np.outer(s, Hy) + np.outer(Hy, s)) + (rho * rho * (y @ Hy) + rho) * np.outer(s, s)
            fresh = False


def random_starts(P: int, n_starts: int, seed: int) -> np.ndarray:
    """Uniform draws from [0, pi/2)^(2P), one row per start."""
    return rng_from_seed(seed).uniform(0.0, HALF_PI, size=(n_starts, 2 * P))


def optimize_random(N: int, P: int, n_starts: int, cfg: OptimizerConfig = OptimizerConfig(),
                    halt_on_bound: bool = True) -> tuple[OptimResult, list[OptimResult]]:
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    results = [
        bfgs_minimize(N, AngleSchedule.from_vector(x0), cfg, halt_on_bound)
        for x0 in random_starts(P, n_starts, cfg.rng_seed)
    ]
    best = min(results, key=lambda r: r.residual)
    return best, results


def linear_dqa_schedule(P: int, dt: float = 1.0, sampling: str = "right_endpoint") -> AngleSchedule:
    """Digitisation of s(t) = t / tau with uniform steps ``dt``."""
    return digitize(ContinuousSchedule("linear", total_time_tau=P * dt), P,
                    sampling=sampling, dt=dt).angles


def interpolate_schedule(sched: AngleSchedule, P: int) -> AngleSchedule:
    """Resample a depth-P' schedule onto depth P.

    The angles are treated as samples of functions on [0, 1] with the first
    and last steps pinned to the endpoints, x_m = (m - 1)/(P' - 1), linearly
    interpolated onto the depth-P grid, then both vectors are rescaled
    together so the mean step duration gamma_m + beta_m matches the source.
    """
    if sched.P == 1:
        gamma = np.full(P, sched.gamma[0])
        beta = np.full(P, sched.beta[0])
    else:
        src = np.linspace(0.0, 1.0, sched.P)
        dst = np.linspace(0.0, 1.0, P)
        gamma = np.interp(dst, src, sched.gamma)
        beta = np.interp(dst, src, sched.beta)
    target = np.mean(sched.gamma + sched.beta)
    current = np.mean(gamma + beta)
    scale = target / current if current > 0 else 1.0
    return AngleSchedule(gamma * scale, beta * scale)


class RegularConstructionError(RuntimeError):
    pass


def _doubling_levels(P_target: int, base: int = 2) -> list[int]:
    levels = [base]
    while levels[-1] < P_target:
        levels.append(levels[-1] * 2)
    if levels[-1] != P_target:
        raise DomainError(f"P_target={P_target} is not {base} times a power of two")
    return levels


def _refinement_levels(doubling: list[int]) -> list[int]:
    # a 3/2 stepping stone between doublings keeps each interpolated start
    # inside the basin of the next regular solution (a plain doubling from
    # P = 64 to 128 at N = 1024 already drifts into an irregular minimum)
    out = [doubling[0]]
    for P in doubling[1:]:
        mid = (3 * out[-1]) // 2
        if out[-1] < mid < P:
            out.append(mid)
        out.append(P)
    return out


def optimize_regular(N: int | None, P_target: int, cfg: OptimizerConfig = OptimizerConfig(),
                     levels: list[int] | None = None, halt_on_bound: bool = False,
                     return_all: bool = False) -> list[OptimResult]:
    """Iterative construction of the regular optimal solution.

    Level P = 2 starts from the midpoint-sampled linear schedule with dt = 1
    (the right-endpoint version falls into an irregular basin); every later
    level starts from the interpolated solution of the previous one, stepping
    through intermediate depths 3P/2. ``N=None`` selects the controllable
    family N = 2P at every level. Levels are polished to the gradient
    tolerance by default so that the duality beta reversed = gamma holds well
    below the bound-gap scale. One result per doubling level is returned
    unless ``return_all``.
    """
    doubling = levels or _doubling_levels(P_target)
    schedule = _refinement_levels(doubling) if levels is None else list(levels)
    results = []
    init = linear_dqa_schedule(schedule[0], sampling="midpoint")
    for P in schedule:
        n_sites = 2 * P if N is None else N
        if results:
            init = interpolate_schedule(results[-1].schedule, P)
        res = bfgs_minimize(n_sites, init, cfg, halt_on_bound)
        gap = res.residual - residual_bound(n_sites, P)
        log.info("regular P=%d N=%d eps=%.3e gap=%.1e iter=%d", P, n_sites, res.residual, gap, res.iterations)
        if not (res.converged and gap < cfg.bound_gap_tolerance):
            raise RegularConstructionError(
                f"level P={P} (N={n_sites}) stopped at eps={res.residual!r}, "
                f"gap {gap:.3e} to the bound after {res.iterations} iterations: {res.message}"
            )
        results.append(res)
    if return_all:
        return results
    keep = set(doubling)
    return [r for r in results if r.schedule.P in keep]


def closed_form_controllable(N: int, P: int) -> AngleSchedule:
    """Analytic zero-residual schedule for 2P = N.

    gamma_m = beta_{P+1-m} = pi/8 at m = ceil((P+1)/2) and pi/4 elsewhere.
    For 2P > N the same angles are returned but they are not optimal.
    """
    if 2 * P < N:
        raise DomainError(f"closed form needs 2P >= N, got P={P}, N={N}")
    gamma = np.full(P, np.pi / 4)
    gamma[-(-(P + 1) // 2) - 1] = np.pi / 8
    return AngleSchedule(gamma, gamma[::-1])


def torus_distance(a: np.ndarray, b: np.ndarray, period: float = HALF_PI) -> np.ndarray:
    """Max-norm distance on the torus [0, period)^n; broadcasts over leading axes."""
    d = np.abs(np.mod(a - b, period))
    return np.max(np.minimum(d, period - d), axis=-1)


def cluster_points(points: np.ndarray, tol: float) -> list[int]:
    """Greedy leader clustering; returns the index of each cluster's first member."""
    leaders: list[int] = []
    for i, p in enumerate(points):
        if not leaders or np.min(torus_distance(points[leaders], p)) > tol:
            leaders.append(i)
    return leaders


@dataclass
class MinimaReport:
    count: int
    representatives: list[AngleSchedule]
    count_modulo_duality: int
    n_starts: int
    n_at_bound: int
    residuals: list[float] = field(default_factory=list)


def enumerate_minima(N: int, P: int, n_starts: int, cluster_tol: float = 1e-4,
                     cfg: OptimizerConfig = OptimizerConfig()) -> MinimaReport:
    """Count distinct global minima reached from random starts.

    Every start is polished to the gradient tolerance (the bound-gap halt would
    leave the point ~sqrt(gap) away from the minimum). Points within 1e-7 of
    the bound are reduced mod pi/2 and clustered in the periodic max-norm.
    """
    if 2 * P >= N:
        raise DomainError(f"minima enumeration needs 2P < N, got P={P}, N={N}")
    _, results = optimize_random(N, P, n_starts, cfg, halt_on_bound=False)
    bound = residual_bound(N, P)
    good = [r for r in results if r.residual - bound < 1e-7]
    if not good:
        return MinimaReport(0, [], 0, n_starts, 0)
    pts = np.array([r.schedule.canonical().as_vector() for r in good])
    leaders = cluster_points(pts, cluster_tol)
    reps = [good[i].schedule.canonical() for i in leaders]

    # merge clusters related by the duality map beta' = pi/2 - gamma reversed, etc.
    rep_pts = np.array([r.as_vector() for r in reps])
    orbit_id = list(range(len(reps)))
    for i, r in enumerate(reps):
        img = symmetry_transform(r, "duality")[0].canonical().as_vector()
        dist = torus_distance(rep_pts, img)
        j = int(np.argmin(dist))
        if dist[j] <= cluster_tol:
            a, b = orbit_id[i], orbit_id[j]
            lo = min(a, b)
            orbit_id = [lo if o in (a, b) else o for o in orbit_id]
    return MinimaReport(
        count=len(reps),
        representatives=reps,
        count_modulo_duality=len(set(orbit_id)),
        n_starts=n_starts,
        n_at_bound=len(good),
        residuals=[good[i].residual for i in leaders],
    )


def fit_loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


@dataclass
class CostScan:
    mode: str
    rows: list[tuple[int, float]]
    slope: float | None


def iteration_cost_scan(P_list: list[int], mode: str, cfg: OptimizerConfig | None = None,
                        N: int = 1024, n_starts: int = 5) -> CostScan:
    """BFGS iteration counts to reach the bound within ``cfg.bound_gap_tolerance``.

    ``random``: median over ``n_starts`` uniform starts per P.
    ``iterative``: each P starts from the interpolated regular solution at the
    previous entry of ``P_list`` (the first from the midpoint linear schedule);
    the counted run halts at the scan tolerance, while the solution handed on
    to the next P is polished to the gradient tolerance.
    """
    cfg = cfg or OptimizerConfig(bound_gap_tolerance=1e-5)
    if list(P_list) != sorted(P_list):
        raise ValueError("P_list must be ascending")
    rows = []
    if mode == "random":
        for P in P_list:
            _, results = optimize_random(N, P, n_starts, replace(cfg, rng_seed=cfg.rng_seed + P))
            ok = [r.iterations for r in results if r.converged]
            rows.append((P, float(np.median(ok)) if ok else float("nan")))
    elif mode == "iterative":
        prev = None
        for P in P_list:
            init = linear_dqa_schedule(P, sampling="midpoint") if prev is None else interpolate_schedule(prev, P)
            res = bfgs_minimize(N, init, cfg)
            rows.append((P, float(res.iterations)))
            prev = bfgs_minimize(N, res.schedule, cfg, halt_on_bound=False).schedule
    else:
        raise ValueError(f"unknown mode {mode!r}")
    slope = None
    if len(rows) >= 2:
        ps, its = zip(*rows)
        slope = fit_loglog_slope(ps, np.maximum(its, 1.0))
    return CostScan(mode, rows, slope)
