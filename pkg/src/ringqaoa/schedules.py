"""Continuous annealing schedules, their digitisation, and the inverse map from angles.

Units are hbar = J = 1, so gamma_m = s_m dt_m and beta_m = (1 - s_m) dt_m.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .pseudospin import AngleSchedule, DomainError

FAMILIES = ("linear", "roland_cerf", "power_law")


@dataclass(frozen=True)
class ContinuousSchedule:
    family: str
    parameter_C: float = 1.0
    total_time_tau: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown schedule family {self.family!r}; expected one of {FAMILIES}")
        if not self.total_time_tau > 0:
            raise DomainError(f"total time must be positive, got {self.total_time_tau!r}")
        if self.family == "roland_cerf" and self.parameter_C < 0:
            raise DomainError("Roland-Cerf slope parameter must be >= 0")
        if self.family == "power_law" and not self.parameter_C > 0:
            raise DomainError("power-law exponent must be > 0")

    def of_fraction(self, x):
        """s as a function of x = t / tau in [0, 1]; vectorised."""
        x = np.asarray(x, dtype=float)
        if self.family == "linear":
            s = x.copy()
        elif self.family == "roland_cerf":
            C = self.parameter_C
            if C == 0.0:
                s = x.copy()
            else:
                s = 0.5 + np.tan(2.0 * (x - 0.5) * np.arctan(C)) / (2.0 * C)
        else:
            s = 0.5 + 0.5 * np.sign(x - 0.5) * np.abs(2.0 * x - 1.0) ** self.parameter_C
        # pin the endpoints against rounding in tan/arctan
        s = np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, s))
        return s


def evaluate(schedule: ContinuousSchedule, t):
    t_arr = np.asarray(t, dtype=float)
    tau = schedule.total_time_tau
    if np.any(t_arr < 0.0) or np.any(t_arr > tau):
        raise DomainError(f"t must lie in [0, {tau}]")
    s = schedule.of_fraction(t_arr / tau)
    return float(s) if np.ndim(s) == 0 else s


@dataclass(frozen=True)
class DigitizedSchedule:
    s_values: np.ndarray
    dt_values: np.ndarray

    @property
    def P(self) -> int:
        return self.s_values.size

    @property
    def tau(self) -> float:
        return float(np.sum(self.dt_values))

    @property
    def angles(self) -> AngleSchedule:
        return AngleSchedule(self.s_values * self.dt_values, (1.0 - self.s_values) * self.dt_values)


def default_sampling(family: str) -> str:
    return "right_endpoint" if family == "linear" else "midpoint"


def digitize(schedule: ContinuousSchedule, P: int, sampling: str | None = None,
             dt: float | None = None) -> DigitizedSchedule:
    """Step approximation with ``P`` values followed by a first-order Trotter split.

    ``dt=None`` splits ``tau`` into equal steps tau / P; a number forces every
    step to last ``dt`` (the sampled shape still follows the schedule's own
    time fraction).
    """
    if P < 1:
        raise DomainError("P must be >= 1")
    sampling = sampling or default_sampling(schedule.family)
    m = np.arange(1, P + 1, dtype=float)
    if sampling == "right_endpoint":
        x = m / P
    elif sampling == "midpoint":
        x = (m - 0.5) / P
    else:
        raise DomainError(f"unknown sampling rule {sampling!r}")
    step = schedule.total_time_tau / P if dt is None else float(dt)
    if not step > 0:
        raise DomainError("step duration must be positive")
    return DigitizedSchedule(schedule.of_fraction(x), np.full(P, step))


def angles_to_s(sched: AngleSchedule) -> tuple[np.ndarray, np.ndarray, float]:
    """Invert the Trotter map: s_m = gamma_m/(gamma_m+beta_m), dt_m = gamma_m+beta_m."""
    dt = sched.gamma + sched.beta
    if np.any(dt == 0.0):
        bad = np.flatnonzero(dt == 0.0) + 1
        raise DomainError(f"zero-duration step(s) at m = {bad.tolist()}")
    return sched.gamma / dt, dt, float(np.sum(dt))


def step_times(dt: np.ndarray, where: str = "end") -> np.ndarray:
    """Time stamp of each step: its end (t_m = sum_{m'<=m} dt_m') or its midpoint."""
    ends = np.cumsum(dt)
    if where == "end":
        return ends
    if where == "mid":
        return ends - 0.5 * np.asarray(dt)
    raise DomainError(f"unknown time stamp {where!r}")


def s_profile(sched: AngleSchedule, where: str = "mid") -> tuple[float, np.ndarray, np.ndarray]:
    """(tau, t_m, s_m) for plotting or collapse analysis."""
    s, dt, tau = angles_to_s(sched)
    return tau, step_times(dt, where), s


@dataclass
class CollapseReport:
    alpha: float
    distance: float
    grid: np.ndarray
    curves: np.ndarray


def scaling_collapse(runs, alpha: float, window: tuple[float, float] = (0.25, 0.75),
                     n_grid: int = 201) -> CollapseReport:
    """Collapse s-profiles under s_tau(t) = 1/2 + tau^-alpha f(t / tau).

    ``runs`` holds ``(tau, t, s)`` triples. Each profile is mapped to
    ``(t / tau, tau**alpha (s - 1/2))`` and linearly resampled on a common grid
    inside ``window``. The reported distance is the largest pairwise sup-norm
    gap divided by the mean sup-norm of the rescaled curves, so that an overall
    change of scale (which any alpha produces) does not count as collapse.
    """
    if len(runs) < 2:
        raise ValueError("scaling collapse needs at least two runs")
    grid = np.linspace(window[0], window[1], n_grid)
    curves = []
    for tau, t, s in runs:
        x = np.asarray(t, dtype=float) / tau
        y = tau**alpha * (np.asarray(s, dtype=float) - 0.5)
        curves.append(np.interp(grid, x, y))
    curves = np.array(curves)
    scale = np.mean(np.max(np.abs(curves), axis=1))
    gaps = [np.max(np.abs(a - b)) for i, a in enumerate(curves) for b in curves[i + 1:]]
    worst = float(max(gaps))
    distance = worst / scale if scale > 0 else worst
    return CollapseReport(alpha, distance, grid, curves)


FAMILY_BRACKETS = {"roland_cerf": (0.1, 100.0), "power_law": (1.0, 32.0)}


@dataclass
class FamilyOptimum:
    family: str
    tau: float
    C: float
    epsilon: float
    interior: bool


def optimize_family_parameter(family: str, tau: float, evaluator: Callable[[ContinuousSchedule], float],
                              bracket: tuple[float, float] | None = None, n_coarse: int = 17,
                              xtol: float = 1e-4) -> FamilyOptimum:
    """Pick the schedule parameter C minimising ``evaluator(schedule)`` at fixed tau.

    A log-spaced coarse scan locates the best grid point, then golden-section
    search refines it (in log C) between its neighbours.
    """
    if family not in FAMILY_BRACKETS:
        raise DomainError(f"family {family!r} has no free parameter to optimise")
    lo, hi = bracket or FAMILY_BRACKETS[family]

    def cost(logc):
        return evaluator(ContinuousSchedule(family, float(np.exp(logc)), tau))

    logs = np.linspace(np.log(lo), np.log(hi), n_coarse)
    values = np.array([cost(u) for u in logs])
    i = int(np.argmin(values))
    interior = 0 < i < n_coarse - 1
    if not interior:
        return FamilyOptimum(family, tau, float(np.exp(logs[i])), float(values[i]), False)
    res = minimize_scalar(cost, bracket=(logs[i - 1], logs[i], logs[i + 1]), method="golden",
                          options={"xtol": xtol})
    if res.fun <= values[i]:
        return FamilyOptimum(family, tau, float(np.exp(res.x)), float(res.fun), True)
    return FamilyOptimum(family, tau, float(np.exp(logs[i])), float(values[i]), True)
