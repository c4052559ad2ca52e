# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled shot loop: density-matrix evolution through depolarizing layers
with quasi-probability Pauli conjugations, then one measurement per term.

Mirrors _kernel_py.run_shots: identical draw consumption and identical
discrete outputs, with linear accumulation order for the expectation sums.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

KERNEL_NAME = "cython"


def run_shots(rho0, double p_layer, double p_twirl,
              u_branch, twirl_idx, u_outcome,
              term_flip, term_phase, int n_qubits):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] rho0_arr = np.ascontiguousarray(rho0, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ub = np.ascontiguousarray(u_branch, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] tw = np.ascontiguousarray(twirl_idx, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] uo = np.ascontiguousarray(u_outcome, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tflip = np.ascontiguousarray(term_flip, dtype=np.int64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] tphase = np.ascontiguousarray(term_phase, dtype=np.complex128)

    cdef Py_ssize_t d = rho0_arr.shape[0]
    cdef Py_ssize_t n_shots = ub.shape[0]
    cdef Py_ssize_t layers = ub.shape[1]
    cdef Py_ssize_t n_terms = tflip.shape[0]

    cdef cnp.ndarray[cnp.int8_t, ndim=1] sign = np.ones(n_shots, dtype=np.int8)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] branch = np.zeros((n_shots, layers), dtype=np.int64)
    cdef cnp.ndarray[cnp.int8_t, ndim=2] term_outcomes = np.empty((n_shots, n_terms), dtype=np.int8)

    cdef cnp.ndarray[cnp.complex128_t, ndim=2] rho = np.empty((d, d), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] tmp = np.empty((d, d), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] phase = np.empty(d, dtype=np.complex128)

    cdef double keep = 1.0 - p_layer
    cdef double mix = p_layer / d
    cdef double e
    cdef double complex ph, ca
    cdef Py_ssize_t s, layer, a, b, j, k, bitpos, g, bit
    cdef long long pidx, flip, fj
    cdef Py_ssize_t pa

    for s in range(n_shots):
        for a in range(d):
            for b in range(d):
                rho[a, b] = rho0_arr[a, b]
        for layer in range(layers):
            for a in range(d):
                for b in range(d):
                    rho[a, b] = rho[a, b] * keep
                rho[a, a] = rho[a, a] + mix
            if ub[s, layer] < p_twirl:
                pidx = tw[s, layer]
                flip = 0
                for k in range(n_qubits):
                    bitpos = n_qubits - 1 - k
                    g = (pidx >> (2 * bitpos)) & 3
                    if g == 1 or g == 2:
                        flip = flip | (1 << bitpos)
                for b in range(d):
                    ph = 1.0
                    for k in range(n_qubits):
                        bitpos = n_qubits - 1 - k
                        g = (pidx >> (2 * bitpos)) & 3
                        bit = (b >> bitpos) & 1
                        if g == 2:
                            ph = ph * (1j if bit == 0 else -1j)
                        elif g == 3 and bit == 1:
                            ph = -ph
                    phase[b] = ph
                for a in range(d):
                    pa = a ^ flip
                    ca = phase[a]
                    for b in range(d):
                        tmp[pa, b ^ flip] = ca * phase[b].conjugate() * rho[a, b]
                rho, tmp = tmp, rho
                branch[s, layer] = pidx
                sign[s] = -sign[s]
        for j in range(n_terms):
            fj = tflip[j]
            e = 0.0
            for b in range(d):
                e = e + (tphase[j, b] * rho[b, b ^ fj]).real
            if e > 1.0:
                e = 1.0
            elif e < -1.0:
                e = -1.0
            term_outcomes[s, j] = 1 if uo[s, j] < 0.5 * (1.0 + e) else -1

    return sign, branch, term_outcomes
