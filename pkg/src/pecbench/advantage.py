"""Success probabilities and the winning-strategy phase diagram.

Success means the estimated energy lands inside the classically certified
interval (e_minus, e_plus).  Two strategies are compared cellwise over a
(noise level, shot budget) grid: probabilistic error cancellation (PEC,
unbiased, variance inflated by the total negativity) and raw estimation
(biased mean, per-shot variance of the noiseless estimator).

Units convention for the bundled 8x8 reference instance: the engine is fed
energy densities (energies per lattice site) together with the matching
per-site weight norm sqrt(sum_j a_j^2 / L).  This intensive parameterization
is what reproduces the documented phase-diagram landmarks (no-advantage
region below ~1e2 shots, PEC at P = 4e-3 around 1e3 shots, PEC boundary
near P = 4e-2 at 1e6 shots); feeding extensive (absolute) energies shifts
the shot axis by a factor of L and contradicts those landmarks.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass

import numpy as np

from . import hubbard
from .errors import ValidationError
from .noise import HamiltonianSummary, NoiseCircuitSpec, gamma_total, noisy_mean, pec_sigma, raw_sigma
from .stats import NormalSpec, erf, interval_probability

LABEL_PEC = "PEC"
LABEL_RAW = "RAW"
LABEL_NONE = "NONE"

_SQRT2 = math.sqrt(2.0)

# 8x8 periodic reference instance: (U, t, mu) = (8, 1, 3.75), D = L = 64,
# n = 2L = 128, certified per-site bounds from cluster decomposition
# (lower) and the Gutzwiller approximation (upper), in units of t.
REFERENCE_SPEC = hubbard.HubbardSpec(rows=8, cols=8, boundary="periodic", t=1.0, U=8.0, mu=3.75)
E_MINUS_PER_SITE = -4.544
E_PLUS_PER_SITE = -3.8365


@dataclass(frozen=True)
class AdvantageProblem:
    """Energy bounds, observable summary, noise model and success threshold."""

    e_minus: float
    e_plus: float
    ham: HamiltonianSummary
    noise: NoiseCircuitSpec
    threshold: float = 0.95

    def __post_init__(self):
        if not self.e_minus < self.e_plus:
            raise ValidationError(
                f"bounds out of order: e_minus={self.e_minus} >= e_plus={self.e_plus}"
            )
        if not 0.0 < self.threshold < 1.0:
            raise ValidationError(f"threshold must lie in (0, 1), got {self.threshold}")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.e_minus + self.e_plus)


@dataclass(frozen=True)
class RegimeGrid:
    """Cellwise success probabilities and winning-strategy labels.

    Arrays are indexed [p_index, shot_index].
    """

    p_values: np.ndarray
    shot_values: np.ndarray
    pec_success: np.ndarray
    raw_success: np.ndarray
    label: np.ndarray

    def __post_init__(self):
        shape = (len(self.p_values), len(self.shot_values))
        for name in ("pec_success", "raw_success", "label"):
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValidationError(f"{name} has shape {arr.shape}, expected {shape}")
        for name in ("pec_success", "raw_success"):
            arr = getattr(self, name)
            if np.any((arr < 0) | (arr > 1)):
                raise ValidationError(f"{name} contains values outside [0, 1]")


def per_site_summary(norm2_squared: float, trace_over_d: float, e0_proxy: float,
                     sites: int) -> HamiltonianSummary:
    """Intensive summary: per-site energies with norm sqrt(norm2_squared / L)."""
    if sites < 1:
        raise ValidationError(f"sites must be >= 1, got {sites}")
    return HamiltonianSummary(
        norm2=math.sqrt(norm2_squared / sites),
        trace_over_d=trace_over_d / sites,
        e0_proxy=e0_proxy / sites,
    )


def reference_problem(p_layer: float = 0.0, threshold: float = 0.95) -> AdvantageProblem:
    """The bundled 8x8 benchmark instance, parameterized in per-site units."""
    spec = REFERENCE_SPEC
    decomp = hubbard.build_hubbard_pauli(spec)
    L = spec.sites
    ham = per_site_summary(
        norm2_squared=hubbard.norm2_squared(decomp),
        trace_over_d=decomp.identity_coefficient,
        e0_proxy=0.5 * (E_MINUS_PER_SITE + E_PLUS_PER_SITE) * L,
        sites=L,
    )
    noise = NoiseCircuitSpec(layers=L, p_layer=p_layer, qubits=2 * L)
    return AdvantageProblem(
        e_minus=E_MINUS_PER_SITE,
        e_plus=E_PLUS_PER_SITE,
        ham=ham,
        noise=noise,
        threshold=threshold,
    )


def _noise_at(prob: AdvantageProblem, p: float | None) -> NoiseCircuitSpec:
    if p is None:
        return prob.noise
    return dataclasses.replace(prob.noise, p_layer=float(p))


def _check_shots(n_shots) -> float:
    n = float(n_shots)
    if not n >= 1:
        raise ValidationError(f"n_shots must be >= 1, got {n_shots}")
    return n


def pec_success_exact(prob: AdvantageProblem, e0: float, n_shots, p: float | None = None) -> float:
    """Interval mass of N(e0, pec_sigma^2) between the classical bounds."""
    n = _check_shots(n_shots)
    sigma = pec_sigma(_noise_at(prob, p), prob.ham, n)
    return interval_probability(NormalSpec(e0, sigma), prob.e_minus, prob.e_plus)


def pec_success_proxy(prob: AdvantageProblem, n_shots, p: float | None = None) -> float:
    """Actionable success proxy: the true mean replaced by the bound midpoint.

    erf(((e_plus - e_minus)/2) * sqrt(N/2) / (gamma_tot * norm2 * sqrt(beta))).
    """
    n = _check_shots(n_shots)
    noise = _noise_at(prob, p)
    scale = gamma_total(noise) * prob.ham.norm2 * math.sqrt(noise.beta)
    half_width = 0.5 * (prob.e_plus - prob.e_minus)
    if math.isinf(scale):
        return 0.0
    return min(1.0, erf(half_width * math.sqrt(n / 2.0) / scale))


def raw_success(prob: AdvantageProblem, n_shots, p: float | None = None) -> float:
    """Interval mass of the biased unmitigated estimator's distribution.

    The unknown true energy in the bias formula is replaced by the bound
    midpoint, the same substitution the PEC proxy makes.
    """
    n = _check_shots(n_shots)
    noise = _noise_at(prob, p)
    ham = dataclasses.replace(prob.ham, e0_proxy=prob.midpoint)
    mean = noisy_mean(noise, ham)
    sigma = raw_sigma(prob.ham, n)
    return interval_probability(NormalSpec(mean, sigma), prob.e_minus, prob.e_plus)


def classify(prob: AdvantageProblem, p: float, n_shots) -> str:
    """Winning strategy at one grid cell: PEC, RAW or NONE.

    Ties are decided on three decimals, and raw wins ties since it is the
    cheaper strategy to run.
    """
    s_pec = pec_success_proxy(prob, n_shots, p=p)
    s_raw = raw_success(prob, n_shots, p=p)
    if max(s_pec, s_raw) < prob.threshold:
        return LABEL_NONE
    if round(s_raw, 3) >= round(s_pec, 3):
        return LABEL_RAW
    return LABEL_PEC


def default_p_axis(num: int = 60) -> np.ndarray:
    return np.logspace(-5, -1, num)


def default_shot_axis(num: int = 60) -> np.ndarray:
    """Log-spaced shot counts in [1, 1e6], deduplicated after int rounding."""
    return np.unique(np.round(np.logspace(0, 6, num)).astype(np.int64))


def _validate_axis(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-D sequence")
    if np.any(np.diff(arr) <= 0):
        raise ValidationError(f"{name} must be strictly increasing")
    return arr


def _sweep_rows(prob: AdvantageProblem, p_chunk: np.ndarray, shots: np.ndarray):
    pec = np.empty((len(p_chunk), len(shots)))
    raw = np.empty_like(pec)
    lab = np.empty(pec.shape, dtype="U4")
    for i, p in enumerate(p_chunk):
        for j, n in enumerate(shots):
            pec[i, j] = pec_success_proxy(prob, n, p=p)
            raw[i, j] = raw_success(prob, n, p=p)
            if max(pec[i, j], raw[i, j]) < prob.threshold:
                lab[i, j] = LABEL_NONE
            elif round(raw[i, j], 3) >= round(pec[i, j], 3):
                lab[i, j] = LABEL_RAW
            else:
                lab[i, j] = LABEL_PEC
    return pec, raw, lab


def worker_count() -> int:
    """Worker count from PECBENCH_WORKERS; defaults to all cores."""
    raw = os.environ.get("PECBENCH_WORKERS", "")
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise ValidationError(f"PECBENCH_WORKERS must be an integer, got {raw!r}") from exc
        if value < 1:
            raise ValidationError(f"PECBENCH_WORKERS must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def sweep(prob: AdvantageProblem, p_axis, shot_axis, workers: int | None = None) -> RegimeGrid:
    """Fill the full (P, N_shots) grid; cell order never affects the result.

    Rows are split across processes when workers > 1 and merged back in
    axis order, so the grid is bitwise identical for any worker count.
    """
    p_arr = _validate_axis(p_axis, "p_axis")
    if np.any((p_arr < 0) | (p_arr >= 1)):
        raise ValidationError("p_axis values must lie in [0, 1)")
    shot_arr = _validate_axis(shot_axis, "shot_axis")
    if np.any(shot_arr < 1):
        raise ValidationError("shot_axis values must be >= 1")

    if workers is None:
        workers = worker_count()
    workers = min(workers, len(p_arr))

    if workers <= 1:
        pec, raw, lab = _sweep_rows(prob, p_arr, shot_arr)
    else:
        from concurrent.futures import ProcessPoolExecutor

        chunks = np.array_split(p_arr, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_sweep_rows, [prob] * len(chunks), chunks,
                                  [shot_arr] * len(chunks)))
        pec = np.vstack([part[0] for part in parts])
        raw = np.vstack([part[1] for part in parts])
        lab = np.vstack([part[2] for part in parts])

    return RegimeGrid(p_values=p_arr, shot_values=shot_arr,
                      pec_success=pec, raw_success=raw, label=lab)
