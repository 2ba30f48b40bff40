"""Lindblad open-system laboratory: generator construction, exact QDB jump
synthesis, spectral and ergodic checks, and time evolution, backed by the
C++ core."""

from qlab._core import (
    Gibbs,
    Generators,
    build_generators,
    choi,
    commutant_dim,
    ergodic_average,
    evolve_exact,
    evolve_split,
    evolve_trotter,
    gap_decay,
    modular_checks,
    null_dimensions,
    schatten_norm,
    selftest,
    spectral_report,
    structure_check,
    synthesize,
    unravel,
    unvec,
    vec,
    verify_qdb,
    LabError,
)

__all__ = [
    "Gibbs",
    "Generators",
    "build_generators",
    "choi",
    "commutant_dim",
    "ergodic_average",
    "evolve_exact",
    "evolve_split",
    "evolve_trotter",
    "gap_decay",
    "modular_checks",
    "null_dimensions",
    "schatten_norm",
    "selftest",
    "spectral_report",
    "structure_check",
    "synthesize",
    "unravel",
    "unvec",
    "vec",
    "verify_qdb",
    "LabError",
]
