"""Numerical laboratory for wave equations with time-singular propagation speeds."""

from .activators import (
    ActivatorWindow,
    GrowthCertificate,
    activator_closed_form,
    build_activator,
    epsilon_profile,
    iterate_universal,
    schedule_c1,
    schedule_c2,
    sobolev_divergence_check,
    verify_convergence,
    verify_growth,
)
from .fdl_verifier import LossReport, measure_loss_exponent, split_times, verify_zone_chain
from .oscillator import OscState, canonical_pair, energies, energy_derivatives, integrate, wronskian
from .speeds import (
    CutoffFunction,
    Envelope,
    PropagationSpeed,
    SpeedClassSpec,
    constant_speed,
    default_cutoff,
    distance_ps1,
    distance_ps2,
    membership_report,
    model_speed_alpha,
    smooth_to_initially_constant,
)

__version__ = "0.1.0"

__all__ = [
    "ActivatorWindow",
    "GrowthCertificate",
    "activator_closed_form",
    "build_activator",
    "epsilon_profile",
    "iterate_universal",
    "schedule_c1",
    "schedule_c2",
    "sobolev_divergence_check",
    "verify_convergence",
    "verify_growth",
    "LossReport",
    "measure_loss_exponent",
    "split_times",
    "verify_zone_chain",
    "OscState",
    "canonical_pair",
    "energies",
    "energy_derivatives",
    "integrate",
    "wronskian",
    "CutoffFunction",
    "Envelope",
    "PropagationSpeed",
    "SpeedClassSpec",
    "constant_speed",
    "default_cutoff",
    "distance_ps1",
    "distance_ps2",
    "membership_report",
    "model_speed_alpha",
    "smooth_to_initially_constant",
]
