"""Pure-numpy shot loop; the import-time fallback for the compiled kernel.

Consumes exactly the same pre-generated random draws as the compiled
version, in the same order, so both kernels sample identical branch, Pauli
and outcome choices for a given seed.
"""

from __future__ import annotations

import numpy as np

from ._pauli_ops import pauli_perm_phase

KERNEL_NAME = "python"


def run_shots(rho0, p_layer, p_twirl, u_branch, twirl_idx, u_outcome,
              term_flip, term_phase, n_qubits):
    """Evolve one density matrix per shot and sample every term outcome.

    Per layer: depolarize, then (with probability p_twirl, decided by the
    pre-drawn uniform) conjugate by the pre-drawn non-identity Pauli and
    flip the shot sign.  Each Pauli term is then measured once on the
    resulting state, yielding an independent +/-1 sample per term.
    Returns (sign, branch, term_outcomes); all outputs are discrete, so
    the compiled kernel reproduces them exactly.
    """
    d = rho0.shape[0]
    n_shots, layers = u_branch.shape
    n_terms = len(term_flip)
    idx = np.arange(d)
    diag = (idx, idx)

    sign = np.ones(n_shots, dtype=np.int8)
    branch = np.zeros((n_shots, layers), dtype=np.int64)
    term_outcomes = np.empty((n_shots, n_terms), dtype=np.int8)
    mix = p_layer / d
    keep = 1.0 - p_layer

    for s in range(n_shots):
        rho = rho0.copy()
        for layer in range(layers):
            rho *= keep
            rho[diag] += mix
            if u_branch[s, layer] < p_twirl:
                pidx = int(twirl_idx[s, layer])
                flip, phase = pauli_perm_phase(pidx, n_qubits)
                perm = idx ^ flip
                new = np.empty_like(rho)
                new[np.ix_(perm, perm)] = np.outer(phase, phase.conj()) * rho
                rho = new
                branch[s, layer] = pidx
                sign[s] = -sign[s]
        for j in range(n_terms):
            e = 0.0
            fj = int(term_flip[j])
            for b in range(d):
                e += (term_phase[j, b] * rho[b, b ^ fj]).real
            e = min(1.0, max(-1.0, e))
            term_outcomes[s, j] = 1 if u_outcome[s, j] < 0.5 * (1.0 + e) else -1

    return sign, branch, term_outcomes
