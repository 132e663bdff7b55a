"""Per-mode two-level dynamics of the full periodic chain.

Each wave vector k carries a spinor evolved by
U_m = (cos 2b + i sin 2b z.tau)(cos 2g + i sin 2g b_k.tau); the initial spinor
is (1, 0), whose Bloch vector is z. The mode's residual energy is
1 - b_k . v with v the final Bloch vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numba
import numpy as np

from .pseudospin import AngleSchedule, DomainError, _check_ring, residual_energy, wavevectors
from .schedules import ContinuousSchedule, digitize

LN2 = math.log(2.0)


def _sin_cos_k(k):
    # sin(pi - k) is exact at k = pi, which keeps the critical field exactly zero
    k = np.asarray(k, dtype=float)
    return np.sin(np.pi - k), np.cos(k)


def mode_unitary(k, gamma: float, beta: float) -> np.ndarray:
    """2x2 step unitary of mode ``k``; vectorised over ``k`` (shape (..., 2, 2))."""
    sk, ck = _sin_cos_k(k)
    bx, bz = -sk, ck
    cg, sg = np.cos(2 * gamma), np.sin(2 * gamma)
    cb, sb = np.cos(2 * beta), np.sin(2 * beta)
    ug = np.empty(np.shape(sk) + (2, 2), dtype=complex)
    ug[..., 0, 0] = cg + 1j * sg * bz
    ug[..., 0, 1] = 1j * sg * bx
    ug[..., 1, 0] = 1j * sg * bx
    ug[..., 1, 1] = cg - 1j * sg * bz
    ub = np.array([[cb + 1j * sb, 0.0], [0.0, cb - 1j * sb]])
    return ub @ ug


def bloch_vector(spinor: np.ndarray) -> np.ndarray:
    """<tau> for spinors of shape (..., 2)."""
    a, b = spinor[..., 0], spinor[..., 1]
    ab = np.conj(a) * b
    return np.stack([2 * ab.real, 2 * ab.imag, np.abs(a) ** 2 - np.abs(b) ** 2], axis=-1)


@dataclass(frozen=True)
class ModeState:
    spinor: np.ndarray
    wave_vector: float

    def __post_init__(self):
        if abs(np.vdot(self.spinor, self.spinor).real - 1.0) > 1e-12:
            raise DomainError("mode spinor must have unit norm")

    @property
    def bloch(self) -> np.ndarray:
        return bloch_vector(self.spinor)


@dataclass
class ModeTrajectory:
    """Spinors of every PBC mode after each step; ``spinors[m]`` follows step m."""

    N: int
    wave_vectors: np.ndarray
    spinors: np.ndarray  # shape (P + 1, n_modes, 2)

    @property
    def final_states(self) -> list[ModeState]:
        return [ModeState(s, float(k)) for s, k in zip(self.spinors[-1], self.wave_vectors)]

    def mode_epsilons(self, step: int = -1) -> np.ndarray:
        sk, ck = _sin_cos_k(self.wave_vectors)
        v = bloch_vector(self.spinors[step])
        return 1.0 - (-sk * v[:, 0] + ck * v[:, 2])

    @property
    def residual(self) -> float:
        return float(np.sum(self.mode_epsilons()) / self.N)


def evolve_modes(N: int, sched: AngleSchedule) -> ModeTrajectory:
    """Evolve the N/2 periodic-chain modes through the schedule."""
    N = _check_ring(N)
    ks = wavevectors("PBC", N).values
    psi = np.zeros((ks.size, 2), dtype=complex)
    psi[:, 0] = 1.0
    out = [psi]
    for g, b in zip(sched.gamma, sched.beta):
        psi = np.einsum("kij,kj->ki", mode_unitary(ks, g, b), psi)
        out.append(psi)
    return ModeTrajectory(N, ks, np.array(out))


def digitized_residual(N: int | None, sched: AngleSchedule) -> float:
    """Residual energy of the N-site ring; ``N=None`` gives the infinite chain.

    A depth-P circuit only sees 2P + 2 sites, so the infinite-chain value is
    the reduced anti-periodic formula evaluated on any ring longer than 2P.
    """
    if N is None:
        return residual_energy(2 * sched.P + 2 + 2, sched).total
    return evolve_modes(N, sched).residual


# effective field --------------------------------------------------------------

def _field_vector(k, gamma, beta):
    """sin(theta) n with U = cos(theta) + i sin(theta) n.tau, and cos(theta)."""
    sk, ck = _sin_cos_k(k)
    cg, sg = np.cos(2 * gamma), np.sin(2 * gamma)
    cb, sb = np.cos(2 * beta), np.sin(2 * beta)
    # z x b = (0, -sin k, 0) for b = (-sin k, 0, cos k)
    vx = cb * sg * (-sk)
    vy = sb * sg * sk
    vz = cb * sg * ck + cg * sb
    cos_theta = cb * cg - sb * sg * ck
    return np.stack([vx, np.broadcast_to(vy, np.shape(vx)), vz], axis=-1), cos_theta


@dataclass(frozen=True)
class EffectiveField:
    omega_vector: np.ndarray
    omega_norm: float
    dt: float
    principal_branch: bool

    @property
    def hamiltonian(self) -> np.ndarray:
        """H_eff = -omega . tau."""
        wx, wy, wz = self.omega_vector
        return -np.array([[wz, wx - 1j * wy], [wx + 1j * wy, -wz]])


def effective_field(k: float, gamma: float, beta: float) -> EffectiveField:
    """Field omega with exp(-i dt H_eff) = mode_unitary, H_eff = -omega . tau, dt = gamma + beta.

    The rotation angle theta = |omega| dt is taken on the principal branch
    [0, pi]; theta = pi (U = -1) has no unique axis and is flagged.
    """
    if not 0.0 < k <= np.pi:
        raise DomainError(f"k must lie in (0, pi], got {k!r}")
    dt = gamma + beta
    if not dt > 0:
        raise DomainError(f"gamma + beta must be positive, got {dt!r}")
    vec, cos_theta = _field_vector(k, gamma, beta)
    sin_theta = float(np.linalg.norm(vec))
    theta = math.atan2(sin_theta, float(cos_theta))
    axis = vec / sin_theta if sin_theta > 0 else np.zeros(3)
    omega = axis * (theta / dt)
    return EffectiveField(omega, theta / dt, dt, bool(theta < np.pi))


def field_norm_squared_expanded(k, gamma, beta):
    """Expanded trigonometric form of |sin(theta) n|^2 in terms of k, gamma, beta."""
    return (np.sin(2 * (beta - gamma)) ** 2
            + (1 - np.cos(k) ** 2) * np.sin(2 * beta) ** 2 * np.sin(2 * gamma) ** 2
            + 0.5 * (1 + np.cos(k)) * np.sin(4 * beta) * np.sin(4 * gamma))


# adiabaticity -----------------------------------------------------------------

def binary_entropy(p) -> np.ndarray:
    """-p ln p - (1-p) ln(1-p) with 0 ln 0 = 0."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log(p), 0.0) - np.where(q > 0, q * np.log(q), 0.0)
    return h


@dataclass
class AdiabaticityReport:
    entropy: float
    normalized: float  # 4 S / N
    per_step: np.ndarray
    degenerate: np.ndarray  # (P, n_modes) flags for U_m = +-1
    probabilities: np.ndarray  # (P, n_modes) weight on the +n eigenvector


def shannon_adiabaticity(N: int, sched: AngleSchedule, degenerate_tol: float = 0.0) -> AdiabaticityReport:
    """Step-averaged Shannon entropy (natural log) of the state in the eigenbasis of each U_m.

    U_m factorises over modes, so its eigenbasis is a product basis and the
    entropy of the product distribution is the sum of the mode entropies.
    The eigenvalue populations do not change under U_m, so the state before
    or after the step gives the same p. Degenerate steps (U_m = +-1 in a mode)
    fall back to the z basis and are flagged.
    """
    traj = evolve_modes(N, sched)
    ks = traj.wave_vectors
    P = sched.P
    probs = np.empty((P, ks.size))
    degenerate = np.zeros((P, ks.size), dtype=bool)
    for m in range(P):
        vec, _ = _field_vector(ks, sched.gamma[m], sched.beta[m])
        norm = np.linalg.norm(vec, axis=-1)
        deg = norm <= degenerate_tol
        axis = np.where(deg[:, None], np.array([0.0, 0.0, 1.0]), vec / np.where(deg, 1.0, norm)[:, None])
        v = bloch_vector(traj.spinors[m])
        probs[m] = 0.5 * (1.0 + np.sum(axis * v, axis=-1))
        degenerate[m] = deg
    per_step = np.sum(binary_entropy(probs), axis=1)
    S = float(np.mean(per_step))
    return AdiabaticityReport(S, 4.0 * S / N, per_step, degenerate, probs)


# continuous-time annealing ------------------------------------------------------

_CF4_NODES = (0.5 - math.sqrt(3.0) / 6.0, 0.5 + math.sqrt(3.0) / 6.0)
_CF4_WEIGHTS = ((3.0 - 2.0 * math.sqrt(3.0)) / 12.0, (3.0 + 2.0 * math.sqrt(3.0)) / 12.0)


@numba.njit(cache=True)
def _apply_exp(a0, a1, ax, az):
    # exp(i (ax tau_x + az tau_z)) acting on (a0, a1)
    n = math.sqrt(ax * ax + az * az)
    c = math.cos(n)
    s = math.sin(n) / n if n > 0 else 1.0
    r0 = (c + 1j * s * az) * a0 + 1j * s * ax * a1
    r1 = 1j * s * ax * a0 + (c - 1j * s * az) * a1
    return r0, r1


@numba.njit(cache=True)
def _cf4_modes(ks, s1, s2, h, w1, w2):
    """Fourth-order commutator-free Magnus steps for H(s) = -2 [s b + (1 - s) z].tau."""
    out = np.empty(ks.size)
    for i in range(ks.size):
        bx = -math.sin(math.pi - ks[i])
        bz = math.cos(ks[i])
        a0 = 1.0 + 0.0j
        a1 = 0.0 + 0.0j
        for n in range(s1.size):
            # field components h(s) = (s bx, 0, s bz + 1 - s) at both nodes
            x1, z1 = s1[n] * bx, s1[n] * bz + 1.0 - s1[n]
            x2, z2 = s2[n] * bx, s2[n] * bz + 1.0 - s2[n]
            # exp(-i h H) = exp(2 i h field.tau); the earlier-weighted factor acts first
            a0, a1 = _apply_exp(a0, a1, 2 * h * (w2 * x1 + w1 * x2), 2 * h * (w2 * z1 + w1 * z2))
            a0, a1 = _apply_exp(a0, a1, 2 * h * (w1 * x1 + w2 * x2), 2 * h * (w1 * z1 + w2 * z2))
        ab = a0.conjugate() * a1
        vx = 2 * ab.real
        vz = abs(a0) ** 2 - abs(a1) ** 2
        out[i] = 1.0 - (bx * vx + bz * vz)
    return out


def continuous_mode_epsilons(ks, schedule: ContinuousSchedule, max_step: float = 0.01) -> np.ndarray:
    """Final 1 - b_k . v of each mode under continuous annealing along ``schedule``."""
    if not max_step > 0:
        raise DomainError("max_step must be positive")
    tau = schedule.total_time_tau
    n_steps = int(math.ceil(tau / max_step - 1e-12))
    h = tau / n_steps
    starts = np.arange(n_steps) * h
    s1 = schedule.of_fraction((starts + _CF4_NODES[0] * h) / tau)
    s2 = schedule.of_fraction((starts + _CF4_NODES[1] * h) / tau)
    ks = np.ascontiguousarray(np.asarray(ks, dtype=float))
    return _cf4_modes(ks, s1, s2, h, _CF4_WEIGHTS[0], _CF4_WEIGHTS[1])


def continuous_residual(N: int, schedule: ContinuousSchedule, max_step: float = 0.01) -> float:
    N = _check_ring(N)
    ks = wavevectors("PBC", N).values
    return float(np.sum(continuous_mode_epsilons(ks, schedule, max_step)) / N)


# scaling runs -------------------------------------------------------------------

@dataclass
class ScalingTable:
    label: str
    tau: np.ndarray
    epsilon: np.ndarray
    parameter_C: np.ndarray | None = None


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r_squared: float
    n_points: int


def fit_power_law(tau, epsilon, window: tuple[float, float] | None = None) -> PowerLawFit:
    """Least squares of log(epsilon) on log(tau); ``window`` restricts tau inclusively."""
    tau = np.asarray(tau, dtype=float)
    eps = np.asarray(epsilon, dtype=float)
    if window is not None:
        keep = (tau >= window[0]) & (tau <= window[1])
        tau, eps = tau[keep], eps[keep]
    if tau.size < 3:
        raise ValueError(f"a power-law fit needs at least 3 points, got {tau.size}")
    if np.any(tau <= 0) or np.any(eps <= 0):
        raise DomainError("power-law fit needs strictly positive tau and epsilon")
    x, y = np.log(tau), np.log(eps)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(slope), float(np.exp(intercept)), float(r2), int(tau.size))


def defect_scaling_run(N: int | None, family: str, tau_grid: Sequence[float], mode: str = "digitized",
                       parameter_C: float | Callable[[float], float] = 1.0, dt: float = 1.0,
                       max_step: float = 0.01) -> ScalingTable:
    """epsilon(tau) for one schedule family.

    ``mode="digitized"`` uses P = tau / dt Trotter steps of duration ``dt``;
    ``mode="continuous"`` integrates each mode's two-level equation.
    ``parameter_C`` may be a function of tau (for per-tau optimised values).
    ``N=None`` evaluates digitized runs on the infinite chain.
    """
    if N is not None:
        N = _check_ring(N)
    elif mode == "continuous":
        raise DomainError("continuous runs need a finite ring")
    taus = np.asarray(tau_grid, dtype=float)
    if np.any(np.diff(taus) <= 0):
        raise DomainError("tau grid must be strictly ascending")
    cs, eps = [], []
    for tau in taus:
        C = parameter_C(tau) if callable(parameter_C) else parameter_C
        sched = ContinuousSchedule(family, C, tau)
        if mode == "digitized":
            P = int(round(tau / dt))
            if P < 1 or abs(P * dt - tau) > 1e-9 * tau:
                raise DomainError(f"tau={tau} is not a multiple of dt={dt}")
            eps.append(digitized_residual(N, digitize(sched, P, dt=dt).angles))
        elif mode == "continuous":
            eps.append(continuous_residual(N, sched, max_step))
        else:
            raise DomainError(f"unknown mode {mode!r}")
        cs.append(C)
    return ScalingTable(f"{family}-{mode}", taus, np.array(eps), np.array(cs, dtype=float))
