"""Depth-P QAOA on the ring of disagrees, solved mode by mode."""
from .pseudospin import (
    AngleSchedule,
    DomainError,
    ResidualBreakdown,
    SYMMETRY_NAMES,
    epsilon_k,
    residual_and_gradient,
    residual_bound,
    residual_energy,
    rotation_about_axis,
    symmetry_transform,
    wavevectors,
)
from .oracle import ChainSpec, apply_qaoa, exact_residual, verify_abc_translation, verify_reduction
from .optimize import (
    OptimizerConfig,
    OptimResult,
    bfgs_minimize,
    closed_form_controllable,
    enumerate_minima,
    iteration_cost_scan,
    optimize_random,
    optimize_regular,
)
from .schedules import ContinuousSchedule, DigitizedSchedule, angles_to_s, digitize, evaluate, scaling_collapse
from .dynamics import (
    EffectiveField,
    ModeState,
    defect_scaling_run,
    effective_field,
    evolve_modes,
    fit_power_law,
    mode_unitary,
    shannon_adiabaticity,
)
from .io import RunManifest, read_schedule, write_schedule

__all__ = [name for name in dir() if not name.startswith("_")]
