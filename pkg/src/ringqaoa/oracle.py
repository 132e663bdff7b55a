"""Brute-force state-vector simulation of the QAOA circuit on a spin ring.

Basis ordering: amplitude index ``i`` encodes the configuration with site
``j`` (1-based) stored in bit ``j - 1``; bit value 0 is spin up (sigma^z = +1).
Only intended as a test oracle, hence the hard cap on the ring size.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pseudospin import AngleSchedule, DomainError

MAX_SITES = 20


@dataclass(frozen=True)
class ChainSpec:
    """Ring of ``n_sites`` spins; the link (N, 1) carries coupling ``boundary_coupling``."""

    n_sites: int
    boundary_coupling: float = 1.0

    def __post_init__(self):
        n = self.n_sites
        if isinstance(n, bool) or int(n) != n or n < 4 or n % 2:
            raise DomainError(f"n_sites must be an even integer >= 4, got {n!r}")
        if n > MAX_SITES:
            raise DomainError(f"n_sites={n} exceeds the state-vector cap of {MAX_SITES}")
        if self.boundary_coupling not in (1, -1):
            raise DomainError(f"boundary_coupling must be +1 or -1, got {self.boundary_coupling!r}")


def spin_values(n_sites: int) -> np.ndarray:
    """sigma^z eigenvalues, shape (2**n, n); column j is site j + 1."""
    idx = np.arange(2**n_sites)
    bits = (idx[:, None] >> np.arange(n_sites)) & 1
    return (1 - 2 * bits).astype(np.int8)


def cost_diagonal(spec: ChainSpec) -> np.ndarray:
    """Diagonal of H_z = sum_j (sigma_j sigma_{j+1} - 1) with the boundary link scaled by J_b."""
    z = spin_values(spec.n_sites).astype(float)
    links = z * np.roll(z, -1, axis=1)
    links[:, -1] *= spec.boundary_coupling
    return np.sum(links - 1.0, axis=1)


def initial_state(spec: ChainSpec) -> np.ndarray:
    dim = 2**spec.n_sites
    return np.full(dim, dim**-0.5, dtype=complex)


def basis_state(spins) -> np.ndarray:
    """Computational basis state for a sequence of +-1 spins (site 1 first)."""
    spins = np.asarray(spins)
    index = int(np.sum(((1 - spins) // 2) << np.arange(spins.size)))
    psi = np.zeros(2**spins.size, dtype=complex)
    psi[index] = 1.0
    return psi


def _apply_mixer(psi: np.ndarray, n: int, beta: float) -> None:
    # exp(-i beta H_x) with H_x = -sum sigma^x factorises into exp(+i beta sigma^x_j)
    c, s = np.cos(beta), 1j * np.sin(beta)
    for j in range(n):
        t = psi.reshape(2 ** (n - 1 - j), 2, 2**j)
        a0 = t[:, 0, :].copy()
        a1 = t[:, 1, :]
        t[:, 0, :] = c * a0 + s * a1
        t[:, 1, :] = c * a1 + s * a0


def apply_qaoa(spec: ChainSpec, sched: AngleSchedule, state: np.ndarray | None = None,
               check_norm: bool = False) -> np.ndarray:
    """Apply exp(-i beta_m H_x) exp(-i gamma_m H_z) for m = 1..P."""
    n = spec.n_sites
    psi = initial_state(spec) if state is None else np.array(state, dtype=complex)
    diag = cost_diagonal(spec)
    for g, b in zip(sched.gamma, sched.beta):
        psi *= np.exp(-1j * g * diag)
        _apply_mixer(psi, n, b)
        if check_norm and abs(np.vdot(psi, psi).real - 1.0) > 1e-12:
            raise FloatingPointError("state norm drifted beyond 1e-12")
    return psi


def _n_sites(state: np.ndarray) -> int:
    n = int(round(np.log2(state.size)))
    if 2**n != state.size:
        raise DomainError(f"state length {state.size} is not a power of two")
    return n


def expectation_link(state: np.ndarray, j: int) -> float:
    """<sigma^z_j sigma^z_{j+1}> with site N wrapping to site 1."""
    n = _n_sites(state)
    if not 1 <= j <= n:
        raise DomainError(f"site index must be in 1..{n}, got {j}")
    z = spin_values(n)
    zz = z[:, j - 1].astype(float) * z[:, j % n]
    return float(np.sum(np.abs(state) ** 2 * zz))


def expectation_diagonal(state: np.ndarray, diag: np.ndarray) -> float:
    return float(np.sum(np.abs(state) ** 2 * diag))


def exact_residual(N: int, sched: AngleSchedule) -> float:
    """(E - E_min) / (E_max - E_min) on the periodic ring, E_min = -2N, E_max = 0."""
    spec = ChainSpec(N, 1)
    psi = apply_qaoa(spec, sched)
    energy = expectation_diagonal(psi, cost_diagonal(spec))
    return (energy + 2.0 * N) / (2.0 * N)


@dataclass(frozen=True)
class ReductionReport:
    full_link: float
    reduced_link: float
    reduced_offcenter_link: float
    difference: float
    passed: bool


def verify_reduction(N: int, sched: AngleSchedule, boundary_coupling: float,
                     tol: float = 1e-10) -> ReductionReport:
    """Compare a link on the full PBC ring with the central link of the reduced ring.

    The reduced ring has 2P + 2 sites and its closing link carries
    ``boundary_coupling``; the link's light cone never reaches that term.
    """
    P = sched.P
    if 2 * P + 2 > N:
        raise DomainError(f"reduction needs 2P + 2 <= N, got P={P}, N={N}")
    full = apply_qaoa(ChainSpec(N, 1), sched)
    full_link = expectation_link(full, N // 2)
    n_r = 2 * P + 2
    reduced = apply_qaoa(ChainSpec(n_r, boundary_coupling), sched)
    central = expectation_link(reduced, n_r // 2)
    # any interior link; translation (possibly with a spin flip) maps it to the centre
    off = expectation_link(reduced, 1)
    diff = max(abs(full_link - central), abs(central - off))
    return ReductionReport(full_link, central, off, diff, diff < tol)


def translate(state: np.ndarray) -> np.ndarray:
    """Periodic translation T with T^dag sigma_j T = sigma_{j+1}.

    T|s_1, ..., s_N> = |s_2, ..., s_N, s_1>.
    """
    n = _n_sites(state)
    # tensor axis a holds site n - a; new site j reads old site j + 1
    perm = [(a - 1) % n for a in range(n)]
    return np.transpose(state.reshape([2] * n), perm).reshape(-1)


def flip_site(state: np.ndarray, j: int) -> np.ndarray:
    """Apply sigma^x on site j (1-based)."""
    idx = np.arange(state.size) ^ (1 << (j - 1))
    return state[idx]


def anti_periodic_translate(state: np.ndarray) -> np.ndarray:
    """T_ABC = T_PBC sigma^x_1."""
    return translate(flip_site(state, 1))


@dataclass(frozen=True)
class TranslationReport:
    fidelity: float
    link_times_n: float
    hamiltonian_expectation: float
    variational_energy: float
    ground_energy: float
    passed: bool


def verify_abc_translation(n_r: int, sched: AngleSchedule, tol: float = 1e-10) -> TranslationReport:
    """Check T_ABC invariance of the ABC-evolved state and the link/energy identity.

    The identity reads ``N_R <sigma_js sigma_js+1> = <H_z^(-) + N_R>``.
    """
    spec = ChainSpec(n_r, -1)
    psi = apply_qaoa(spec, sched)
    fidelity = abs(np.vdot(psi, anti_periodic_translate(psi))) ** 2
    diag = cost_diagonal(spec)
    lhs = n_r * expectation_link(psi, n_r // 2)
    rhs = expectation_diagonal(psi, diag + n_r)
    energy = expectation_diagonal(psi, diag)
    ground = float(np.min(diag))
    passed = abs(1.0 - fidelity) < tol and abs(lhs - rhs) < tol and energy >= ground - tol
    return TranslationReport(fidelity, lhs, rhs, energy, ground, passed)
