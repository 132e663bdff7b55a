"""Self-check suites shared by the CLI and the acceptance tests."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .dynamics import effective_field, mode_unitary
from .optimize import rng_from_seed
from .oracle import exact_residual, verify_abc_translation, verify_reduction
from .pseudospin import HALF_PI, SYMMETRY_NAMES, AngleSchedule, predicted_residual, residual_energy, symmetry_transform


@dataclass
class SuiteReport:
    suite: str
    passed: bool
    checks: int
    worst: float
    tolerance: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}: {self.checks} checks, worst {self.worst:.3e} (tol {self.tolerance:.0e})"


def random_schedule(rng: np.random.Generator, P: int, high: float = np.pi) -> AngleSchedule:
    return AngleSchedule(rng.uniform(0.0, high, P), rng.uniform(0.0, high, P))


def oracle_suite(seed: int = 0, samples: int = 200, sizes=(4, 6, 8, 10, 12), depths=range(1, 7),
                 tol: float = 1e-10) -> SuiteReport:
    """Pseudo-spin residual against brute-force state vectors, both regimes."""
    rng = rng_from_seed(seed)
    worst, n, per = 0.0, 0, {}
    for N in sizes:
        for P in depths:
            err = 0.0
            for _ in range(samples):
                sched = random_schedule(rng, P)
                err = max(err, abs(residual_energy(N, sched).total - exact_residual(N, sched)))
            per[f"N={N},P={P}"] = err
            worst = max(worst, err)
            n += samples
    return SuiteReport("oracle", worst < tol, n, worst, tol, per)


def translation_suite(seed: int = 0, samples: int = 5, N: int = 10, depths=(1, 2, 3),
                     tol: float = 1e-10) -> SuiteReport:
    """Light-cone reduction with either boundary sign, and the anti-periodic translation identities."""
    rng = rng_from_seed(seed)
    worst, n, ok = 0.0, 0, True
    for P in depths:
        for _ in range(samples):
            sched = random_schedule(rng, P)
            for jb in (1, -1):
                rep = verify_reduction(N, sched, jb, tol)
                ok &= rep.passed
                worst = max(worst, rep.difference)
                n += 1
            trep = verify_abc_translation(2 * P + 2, sched, tol)
            ok &= trep.passed
            worst = max(worst, abs(1 - trep.fidelity), abs(trep.link_times_n - trep.hamiltonian_expectation))
            n += 1
    return SuiteReport("translation", bool(ok), n, worst, tol)


def symmetry_suite(seed: int = 0, samples: int = 1000, depths=range(1, 9), tol: float = 1e-12) -> SuiteReport:
    """All landscape symmetries on random schedules; ring sizes cover both regimes."""
    rng = rng_from_seed(seed)
    depths = list(depths)
    worst = {name: 0.0 for name in SYMMETRY_NAMES}
    for _ in range(samples):
        P = int(rng.choice(depths))
        N = int(rng.choice([max(4, 2 * P), 2 * P + 2, 2 * P + 10]))
        sched = random_schedule(rng, P, HALF_PI)
        eps = residual_energy(N, sched).total
        for name in SYMMETRY_NAMES:
            image, relation = symmetry_transform(sched, name)
            err = abs(residual_energy(N, image).total - predicted_residual(eps, relation))
            worst[name] = max(worst[name], err)
    w = max(worst.values())
    return SuiteReport("symmetry", w < tol, samples * len(SYMMETRY_NAMES), w, tol, worst)


def effective_field_suite(seed: int = 0, samples: int = 10_000, tol: float = 1e-12) -> SuiteReport:
    """Effective-field reconstruction, exact criticality, and the linear gap near k = pi."""
    rng = rng_from_seed(seed)
    worst, used = 0.0, 0
    for _ in range(samples):
        k = rng.uniform(0.0, np.pi)
        g, b = rng.uniform(0.0, HALF_PI, 2)
        if k == 0.0 or g + b == 0.0:
            continue
        fld = effective_field(k, g, b)
        if not fld.omega_norm * fld.dt < np.pi:
            continue
        err = np.max(np.abs(expm(-1j * fld.dt * fld.hamiltonian) - mode_unitary(k, g, b)))
        worst = max(worst, float(err))
        used += 1
    critical = [effective_field(np.pi, x, x).omega_norm for x in np.linspace(0.05, 1.5, 30)]
    crit_ok = all(c == 0.0 for c in critical)
    # |omega dt| / (|k - pi| |sin 2 gamma|) -> 1 as k -> pi at beta = gamma = pi/8
    g = np.pi / 8
    deltas = [1e-2, 1e-3, 1e-4, 1e-5]
    ratios = [effective_field(np.pi - d, g, g).omega_norm * (2 * g) / (d * abs(np.sin(2 * g))) for d in deltas]
    ratio_ok = abs(ratios[-1] - 1.0) < 1e-6 and all(
        abs(r2 - 1.0) <= abs(r1 - 1.0) for r1, r2 in zip(ratios, ratios[1:]))
    details = {"reconstructed": used, "critical_max_norm": max(critical), "gap_ratios": ratios}
    return SuiteReport("effective-field", worst < tol and crit_ok and ratio_ok, used + len(critical) + len(ratios),
                       worst, tol, details)


def controllable_check(N: int, sched: AngleSchedule, tol: float = 1e-12) -> SuiteReport:
    eps = residual_energy(N, sched).total
    return SuiteReport("controllable", abs(eps) < tol, 1, abs(eps), tol, {"N": N, "P": sched.P, "epsilon": eps})


SUITES = {
    "oracle": oracle_suite,
    "translation": translation_suite,
    "symmetry": symmetry_suite,
    "effective-field": effective_field_suite,
}

# letter names accepted by ``verify --suite``
SUITE_ALIASES = {"appendix-a": "translation", "appendix-b": "symmetry", "appendix-c": "effective-field"}
