"""Pseudo-spin residual-energy landscape of QAOA on the antiferromagnetic Ising ring.

After a Jordan-Wigner transformation each wave-vector ``k`` evolves as an
independent two-level system. Its Bloch vector starts at ``z`` and is moved by
alternating rotations about ``b_k = (-sin k, 0, cos k)`` (angle ``4 gamma_m``)
and about ``z`` (angle ``4 beta_m``). The mode contributes
``eps_k = 1 - b_k . v_k`` to the residual energy.

Rotation convention: ``rotation_about_axis(a, theta)`` turns vectors
*clockwise* about ``a`` (i.e. it is ``exp(-theta [a]_x)``). This is the
adjoint action of the SU(2) factor ``exp(+i theta/4 a.tau)`` appearing in
:func:`ringqaoa.dynamics.mode_unitary`, so the SO(3) and SU(2) pictures agree
exactly. The residual energy itself is insensitive to the handedness because
the landscape is invariant under ``(gamma, beta) -> (-gamma, -beta)``; the
choice is pinned by ``tests/test_oracle.py::test_calibration_against_state_vector``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numba
import numpy as np

HALF_PI = 0.5 * np.pi
Z_AXIS = np.array([0.0, 0.0, 1.0])

Flavor = Literal["PBC", "ABC"]


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a landscape function."""


@dataclass(frozen=True)
class AngleSchedule:
    """The ``2P`` QAOA angles. ``gamma`` drives the cost layer, ``beta`` the mixer."""

    gamma: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=float).reshape(-1)
        beta = np.array(self.beta, dtype=float).reshape(-1)
        if gamma.size != beta.size:
            raise DomainError(
                f"gamma and beta lengths differ: |gamma|={gamma.size}, |beta|={beta.size}"
            )
        if gamma.size < 1:
            raise DomainError("a schedule needs at least one step")
        if not (np.all(np.isfinite(gamma)) and np.all(np.isfinite(beta))):
            raise DomainError("schedule angles must be finite")
        gamma.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "beta", beta)

    @property
    def P(self) -> int:
        return self.gamma.size

    @property
    def total_time(self) -> float:
        """Sum rule: tau = sum(gamma_m + beta_m) with hbar = 1."""
        return float(np.sum(self.gamma + self.beta))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.gamma, self.beta])

    @classmethod
    def from_vector(cls, x) -> "AngleSchedule":
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size % 2:
            raise DomainError(f"expected a flat vector of even length, got shape {x.shape}")
        P = x.size // 2
        return cls(x[:P], x[P:])

    def canonical(self) -> "AngleSchedule":
        """Representative with every angle reduced into [0, pi/2)."""
        return AngleSchedule(_reduce(self.gamma), _reduce(self.beta))

    def reversed(self) -> "AngleSchedule":
        return AngleSchedule(self.gamma[::-1], self.beta[::-1])


def _reduce(x: np.ndarray) -> np.ndarray:
    # mod of a tiny negative number rounds up to exactly pi/2; fold it back to 0
    r = np.mod(x, HALF_PI)
    return np.where(r >= HALF_PI, 0.0, r)


def canonicalize(sched: AngleSchedule) -> AngleSchedule:
    return sched.canonical()


@dataclass(frozen=True)
class WaveVectorSet:
    flavor: str
    chain_length: int
    values: np.ndarray

    def __len__(self):
        return self.values.size


def wavevectors(flavor: Flavor, n_r: int) -> WaveVectorSet:
    """Allowed pseudo-spin momenta in (0, pi) for a ring of ``n_r`` sites.

    PBC uses odd multiples of pi/n_r (n_r/2 modes), ABC uses even multiples
    (n_r/2 - 1 modes).
    """
    if isinstance(n_r, bool) or int(n_r) != n_r:
        raise DomainError(f"chain length must be an integer, got {n_r!r}")
    n_r = int(n_r)
    if n_r < 4 or n_r % 2:
        raise DomainError(f"chain length must be even and >= 4, got {n_r}")
    if flavor == "PBC":
        values = np.pi * np.arange(1, n_r, 2) / n_r
    elif flavor == "ABC":
        values = np.pi * np.arange(2, n_r - 1, 2) / n_r
    else:
        raise DomainError(f"unknown boundary flavor {flavor!r}")
    values.setflags(write=False)
    return WaveVectorSet(flavor, n_r, values)


def b_axis(k) -> np.ndarray:
    """Unit vector ``(-sin k, 0, cos k)``; vectorised over ``k``."""
    k = np.asarray(k, dtype=float)
    return np.stack([-np.sin(k), np.zeros_like(k), np.cos(k)], axis=-1)


def rotation_about_axis(axis, angle: float) -> np.ndarray:
    """3x3 matrix turning vectors clockwise by ``angle`` about the unit ``axis``."""
    a = np.asarray(axis, dtype=float)
    if a.shape != (3,):
        raise DomainError(f"axis must be a 3-vector, got shape {a.shape}")
    if abs(np.linalg.norm(a) - 1.0) > 1e-10:
        raise DomainError(f"axis must have unit norm, |axis| = {np.linalg.norm(a)!r}")
    K = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    c, s = np.cos(angle), np.sin(angle)
    return c * np.eye(3) - s * K + (1.0 - c) * np.outer(a, a)


# Vectorised rotations on stacks of Bloch vectors, shape (n_modes, 3).

def _rot_z(v: np.ndarray, theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty_like(v)
    out[:, 0] = c * v[:, 0] + s * v[:, 1]
    out[:, 1] = c * v[:, 1] - s * v[:, 0]
    out[:, 2] = v[:, 2]
    return out


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    out[..., 2] = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return out


def _rot_axes(v: np.ndarray, axes: np.ndarray, theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    proj = np.sum(axes * v, axis=1, keepdims=True)
    return c * v - s * _cross(axes, v) + (1.0 - c) * proj * axes


def mode_bloch_trajectory(ks, sched: AngleSchedule) -> np.ndarray:
    """Bloch vectors after every half-step.

    Returns an array of shape ``(2P + 1, n_modes, 3)``: entry 0 is ``z``,
    entry ``2m - 1`` follows the ``gamma_m`` rotation and entry ``2m`` the
    ``beta_m`` rotation.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    axes = b_axis(ks)
    traj = np.empty((2 * sched.P + 1, ks.size, 3))
    v = np.tile(Z_AXIS, (ks.size, 1))
    traj[0] = v
    for m in range(sched.P):
        v = _rot_axes(v, axes, 4.0 * sched.gamma[m])
        traj[2 * m + 1] = v
        v = _rot_z(v, 4.0 * sched.beta[m])
        traj[2 * m + 2] = v
    return traj


def final_bloch_vectors(ks, sched: AngleSchedule) -> np.ndarray:
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    axes = b_axis(ks)
    v = np.tile(Z_AXIS, (ks.size, 1))
    for g, b in zip(sched.gamma, sched.beta):
        v = _rot_z(_rot_axes(v, axes, 4.0 * g), 4.0 * b)
    return v


def epsilon_k(k: float, sched: AngleSchedule) -> float:
    """Single-mode residual ``1 - b_k . v_k``; lies in [0, 2]."""
    if not 0.0 < k < np.pi:
        raise DomainError(f"k must lie in (0, pi), got {k!r}")
    v = final_bloch_vectors([k], sched)[0]
    return float(1.0 - b_axis(k) @ v)


def mode_epsilons(ks, sched: AngleSchedule) -> np.ndarray:
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    v = final_bloch_vectors(ks, sched)
    return 1.0 - np.sum(b_axis(ks) * v, axis=1)


@dataclass(frozen=True)
class ResidualBreakdown:
    total: float
    wavevectors: np.ndarray
    mode_values: np.ndarray
    regime: str  # "ABC_reduced" (2P < N) or "PBC_full" (2P >= N)
    chain_length: int = field(default=0)

    @property
    def per_mode(self) -> dict:
        return dict(zip(self.wavevectors.tolist(), self.mode_values.tolist()))

    def recombine(self) -> float:
        return _combine(self.regime, self.chain_length, self.mode_values)


def _check_ring(N) -> int:
    if isinstance(N, bool) or int(N) != N or N < 4 or N % 2:
        raise DomainError(f"ring size must be an even integer >= 4, got {N!r}")
    return int(N)


def landscape_modes(N: int, P: int) -> tuple[str, WaveVectorSet]:
    """Regime and wave-vector set used to evaluate depth-``P`` QAOA on ``N`` sites."""
    N = _check_ring(N)
    if 2 * P < N:
        return "ABC_reduced", wavevectors("ABC", 2 * P + 2)
    return "PBC_full", wavevectors("PBC", N)


def _combine(regime: str, n_r: int, mode_values: np.ndarray) -> float:
    # ascending-k summation order is part of the reproducibility contract
    if regime == "ABC_reduced":
        return float((1.0 + np.sum(mode_values)) / n_r)
    return float(np.sum(mode_values) / n_r)


def residual_energy(N: int, sched: AngleSchedule) -> ResidualBreakdown:
    """Normalised residual energy of depth-P QAOA on the ``N``-site ring.

    For ``2P < N`` the light cone of a link covers ``2P + 2`` sites, and the
    reduced chain may be closed with anti-periodic boundaries; the result is
    then independent of ``N``. Otherwise the full periodic chain is used.
    """
    regime, kset = landscape_modes(N, sched.P)
    values = mode_epsilons(kset.values, sched)
    total = _combine(regime, kset.chain_length, values)
    return ResidualBreakdown(total, kset.values, values, regime, kset.chain_length)


def residual_bound(N: int, P: int) -> float:
    """Lower bound on the depth-P residual energy: 1/(2P+2) if 2P < N, else 0."""
    N = _check_ring(N)
    return 1.0 / (2 * P + 2) if 2 * P < N else 0.0


@numba.njit(cache=True)
def _value_and_gradient(ks, gamma, beta, weight):
    # per mode: forward sweep storing Bloch vectors, then reverse sweep for the cotangent
    P = gamma.size
    vals = np.empty(ks.size)
    grad = np.zeros(2 * P)
    traj = np.empty((2 * P + 1, 3))
    cg = np.cos(4.0 * gamma)
    sg = np.sin(4.0 * gamma)
    cb = np.cos(4.0 * beta)
    sb = np.sin(4.0 * beta)
    for i in range(ks.size):
        ax = -np.sin(ks[i])
        az = np.cos(ks[i])
        x, y, z = 0.0, 0.0, 1.0
        traj[0, 0], traj[0, 1], traj[0, 2] = x, y, z
        for m in range(P):
            c, s = cg[m], sg[m]
            proj = ax * x + az * z
            # a x v for a = (ax, 0, az)
            cx = -az * y
            cy = az * x - ax * z
            cz = ax * y
            x, y, z = c * x - s * cx + (1.0 - c) * proj * ax, c * y - s * cy, c * z - s * cz + (1.0 - c) * proj * az
            traj[2 * m + 1, 0], traj[2 * m + 1, 1], traj[2 * m + 1, 2] = x, y, z
            c, s = cb[m], sb[m]
            x, y = c * x + s * y, c * y - s * x
            traj[2 * m + 2, 0], traj[2 * m + 2, 1], traj[2 * m + 2, 2] = x, y, z
        vals[i] = 1.0 - (ax * x + az * z)
        lx, ly, lz = -ax * weight, 0.0, -az * weight
        for m in range(P - 1, -1, -1):
            vx, vy = traj[2 * m + 2, 0], traj[2 * m + 2, 1]
            # lambda . (-(z x v)) with z x v = (-vy, vx, 0)
            grad[P + m] += -4.0 * (-lx * vy + ly * vx)
            c, s = cb[m], sb[m]
            lx, ly = c * lx - s * ly, c * ly + s * lx
            ux, uy, uz = traj[2 * m + 1, 0], traj[2 * m + 1, 1], traj[2 * m + 1, 2]
            cx = -az * uy
            cy = az * ux - ax * uz
            cz = ax * uy
            grad[m] += -4.0 * (lx * cx + ly * cy + lz * cz)
            c, s = cg[m], -sg[m]
            proj = ax * lx + az * lz
            cx = -az * ly
            cy = az * lx - ax * lz
            cz = ax * ly
            lx, ly, lz = c * lx - s * cx + (1.0 - c) * proj * ax, c * ly - s * cy, c * lz - s * cz + (1.0 - c) * proj * az
    return vals, grad


def residual_and_gradient(N: int, sched: AngleSchedule) -> tuple[float, np.ndarray]:
    """Residual energy and its gradient ``[d/dgamma, d/dbeta]``.

    Reverse-mode sweep through the rotation chain: the forward pass stores the
    Bloch vectors, the backward pass carries the cotangent of ``v`` and picks
    up ``lambda . (-a x v)`` for each rotation generator.
    """
    regime, kset = landscape_modes(N, sched.P)
    vals, grad = _value_and_gradient(kset.values, sched.gamma, sched.beta, 1.0 / kset.chain_length)
    return _combine(regime, kset.chain_length, vals), grad


def residual_gradient(N: int, sched: AngleSchedule) -> np.ndarray:
    return residual_and_gradient(N, sched)[1]


# name -> (map on (gamma, beta), relation); relation "same" means eps' = eps,
# "complement" means eps' = 1 - eps.
def _q(x):
    return HALF_PI - x


_SYMMETRIES = {
    "duality": (lambda g, b: (_q(b[::-1]), _q(g[::-1])), "same"),
    "ferro_flip": (lambda g, b: (_q(g), b), "complement"),
    "inversion": (lambda g, b: (_q(g), _q(b)), "same"),
    "reversal": (lambda g, b: (b[::-1], g[::-1]), "same"),
    "beta_flip": (lambda g, b: (g, _q(b)), "complement"),
    "reversal_gamma_flip": (lambda g, b: (b[::-1], _q(g[::-1])), "complement"),
    "reversal_beta_flip": (lambda g, b: (_q(b[::-1]), g[::-1]), "complement"),
    "negation": (lambda g, b: (-g, -b), "same"),
}

SYMMETRY_NAMES = tuple(_SYMMETRIES)


def symmetry_transform(sched: AngleSchedule, which: str) -> tuple[AngleSchedule, str]:
    """Image of ``sched`` under a landscape symmetry and the predicted relation.

    Returns ``(image, relation)`` with relation ``"same"`` (eps' = eps) or
    ``"complement"`` (eps' = 1 - eps).
    """
    try:
        fn, relation = _SYMMETRIES[which]
    except KeyError:
        raise DomainError(
            f"unknown symmetry {which!r}; expected one of {', '.join(SYMMETRY_NAMES)}"
        ) from None
    g, b = fn(sched.gamma, sched.beta)
    return AngleSchedule(g, b), relation


def predicted_residual(eps: float, relation: str) -> float:
    return eps if relation == "same" else 1.0 - eps
