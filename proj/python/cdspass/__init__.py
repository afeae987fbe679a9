"""CDS graphical passwords: challenges, trace verification, attack lab and statistics."""

from ._core import (
    CdsError,
    Challenge,
    Decision,
    DegradeParams,
    GridSpec,
    anova_f,
    candidate_count,
    degrade_pixel,
    entropy_bits,
    generate_challenge,
    jitter_trace,
    map_polyline_to_cells,
    max_trace_length,
    password_space,
    shoulder_surf,
    simulate_guess_attack,
    synthesize_trace,
    t_test,
    verify_trace,
)

__all__ = [
    "CdsError",
    "Challenge",
    "Decision",
    "DegradeParams",
    "GridSpec",
    "anova_f",
    "candidate_count",
    "degrade_pixel",
    "entropy_bits",
    "generate_challenge",
    "jitter_trace",
    "map_polyline_to_cells",
    "max_trace_length",
    "password_space",
    "shoulder_surf",
    "simulate_guess_attack",
    "synthesize_trace",
    "t_test",
    "verify_trace",
]
