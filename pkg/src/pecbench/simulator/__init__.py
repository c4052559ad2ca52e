"""Monte Carlo validation of the analytic noise/mitigation stack.

The shot loop has a compiled core (Cython) and a pure-python fallback,
selected at import time; ``active_kernel()`` reports which one is live.
"""

from .core import (
    DensityMatrix,
    QuasiProbDecomposition,
    ShotRecord,
    active_kernel,
    apply_depolarizing,
    batch_means,
    build_qpd,
    depolarizing_superoperator,
    lilliefors_critical,
    normality_check,
    prepare_ground_state,
    qpd_composition_residual,
    qpd_inverse_superoperator,
    run_pec_estimate,
    run_raw_estimate,
    simulate_report,
    twirl_superoperator,
)

__all__ = [
    "DensityMatrix",
    "QuasiProbDecomposition",
    "ShotRecord",
    "active_kernel",
    "apply_depolarizing",
    "batch_means",
    "build_qpd",
    "depolarizing_superoperator",
    "lilliefors_critical",
    "normality_check",
    "prepare_ground_state",
    "qpd_composition_residual",
    "qpd_inverse_superoperator",
    "run_pec_estimate",
    "run_raw_estimate",
    "simulate_report",
    "twirl_superoperator",
]
