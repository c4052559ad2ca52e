"""2-D Fermi-Hubbard Hamiltonian and its Jordan-Wigner Pauli decomposition.

Mode ordering: all spin-up modes first, in row-major site order, then all
spin-down modes.  Site (r, c) on a rows x cols lattice has index
s = r * cols + c; its spin-up mode is s and its spin-down mode is L + s.

Dense-matrix operations (reconstruction, exact diagonalization) are capped
at MAX_DENSE_QUBITS qubits; the decomposition itself has O(L) terms and is
built at any size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, ValidationError

MAX_DENSE_QUBITS = 12

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


@dataclass(frozen=True)
class HubbardSpec:
    """Lattice geometry plus (t, U, mu) couplings."""

    rows: int
    cols: int
    boundary: str = "open"  # "open" | "periodic"
    t: float = 1.0
    U: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValidationError(
                f"lattice dimensions must be >= 1, got {self.rows}x{self.cols}"
            )
        if self.boundary not in ("open", "periodic"):
            raise ValidationError(f"unknown boundary condition {self.boundary!r}")
        for name in ("t", "U", "mu"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"coupling {name} must be finite")

    @property
    def sites(self) -> int:
        return self.rows * self.cols

    @property
    def qubits(self) -> int:
        return 2 * self.sites


@dataclass(frozen=True)
class PauliDecomposition:
    """Weighted Pauli strings plus the separately-stored identity weight.

    ``terms`` maps length-n strings over {I, X, Y, Z} to real coefficients;
    the all-identity string is never a key, its weight lives in
    ``identity_coefficient`` (= Tr[H] / 2^n).
    """

    n: int
    terms: dict = field(default_factory=dict)
    identity_coefficient: float = 0.0

    def __post_init__(self):
        for string, coeff in self.terms.items():
            if len(string) != self.n:
                raise ValidationError(
                    f"Pauli string {string!r} has length {len(string)}, expected {self.n}"
                )
            if set(string) - set("IXYZ"):
                raise ValidationError(f"invalid Pauli letters in {string!r}")
            if not math.isfinite(coeff):
                raise ValidationError(f"non-finite coefficient for {string!r}")
        if "I" * self.n in self.terms:
            raise ValidationError("identity string must go in identity_coefficient")
        if not math.isfinite(self.identity_coefficient):
            raise ValidationError("identity_coefficient must be finite")


def lattice_edges(rows: int, cols: int, boundary: str) -> list[tuple[int, int]]:
    """Nearest-neighbour site pairs, each unordered pair listed once.

    Periodic wrap edges that coincide with an interior edge (a periodic
    dimension of size 2) are not duplicated.
    """
    periodic = boundary == "periodic"
    edges = set()
    for r in range(rows):
        for c in range(cols):
            s = r * cols + c
            if c + 1 < cols:
                edges.add((s, s + 1))
            elif periodic and cols > 2:
                edges.add((r * cols, s))
            if r + 1 < rows:
                edges.add((s, s + cols))
            elif periodic and rows > 2:
                edges.add((c, s))
    return sorted(edges)


def _hopping_string(n: int, p: int, q: int, kind: str) -> str:
    # X Z..Z X (or Y Z..Z Y) between modes p < q.
    letters = ["I"] * n
    letters[p] = kind
    letters[q] = kind
    for m in range(p + 1, q):
        letters[m] = "Z"
    return "".join(letters)


def build_hubbard_pauli(spec: HubbardSpec) -> PauliDecomposition:
    """Jordan-Wigner qubit decomposition of the Hubbard Hamiltonian.

    Per edge and spin sector: two hopping strings (XZ..ZX and YZ..ZY) with
    coefficient -t/2.  Per site: a ZZ term with +U/4 on the paired up/down
    modes.  Per mode: a single Z with mu/2 - U/4.  Identity weight:
    U*L/4 - mu*L.
    """
    L = spec.sites
    n = spec.qubits
    terms: dict[str, float] = {}

    def add(string: str, coeff: float) -> None:
        terms[string] = terms.get(string, 0.0) + coeff

    for a, b in lattice_edges(spec.rows, spec.cols, spec.boundary):
        for offset in (0, L):  # spin-up then spin-down sector
            p, q = a + offset, b + offset
            add(_hopping_string(n, p, q, "X"), -spec.t / 2.0)
            add(_hopping_string(n, p, q, "Y"), -spec.t / 2.0)

    z_coeff = spec.mu / 2.0 - spec.U / 4.0
    for s in range(L):
        letters = ["I"] * n
        letters[s] = "Z"
        letters[L + s] = "Z"
        add("".join(letters), spec.U / 4.0)
    for mode in range(n):
        letters = ["I"] * n
        letters[mode] = "Z"
        add("".join(letters), z_coeff)

    terms = {s: c for s, c in terms.items() if c != 0.0}
    identity = spec.U * L / 4.0 - spec.mu * L
    return PauliDecomposition(n=n, terms=terms, identity_coefficient=identity)


def norm2_squared(decomp: PauliDecomposition) -> float:
    """Sum of squared coefficients over the non-identity terms."""
    return float(sum(c * c for c in decomp.terms.values()))


def norm2_squared_closed_form(spec: HubbardSpec) -> float:
    """Edge-count closed form: E*t^2 + 2L*(mu/2 - U/4)^2 + L*(U/4)^2.

    E = 2L for a periodic lattice with both dimensions >= 3.
    """
    L = spec.sites
    n_edges = len(lattice_edges(spec.rows, spec.cols, spec.boundary))
    z = spec.mu / 2.0 - spec.U / 4.0
    return n_edges * spec.t**2 + 2 * L * z**2 + L * (spec.U / 4.0) ** 2


def identity_coefficient_closed_form(spec: HubbardSpec) -> float:
    L = spec.sites
    return spec.U * L / 4.0 - spec.mu * L


def _check_dense_capacity(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(
            f"dense matrix operations are capped at {MAX_DENSE_QUBITS} qubits, got n={n}"
        )


def pauli_matrix(string: str) -> np.ndarray:
    """Dense matrix of a Pauli string (leftmost letter = most significant qubit)."""
    _check_dense_capacity(len(string))
    out = np.array([[1.0 + 0.0j]])
    for letter in string:
        out = np.kron(out, _PAULI_1Q[letter])
    return out


def reconstruct_matrix(decomp: PauliDecomposition) -> np.ndarray:
    """Dense Hermitian matrix sum_j a_j P_j + identity_coefficient * I."""
    _check_dense_capacity(decomp.n)
    d = 2**decomp.n
    out = np.eye(d, dtype=complex) * decomp.identity_coefficient
    for string, coeff in decomp.terms.items():
        out += coeff * pauli_matrix(string)
    return out


def exact_ground_energy(spec: HubbardSpec) -> float:
    """Minimal eigenvalue of the reconstructed Hamiltonian (n <= 12)."""
    _check_dense_capacity(spec.qubits)
    h = reconstruct_matrix(build_hubbard_pauli(spec))
    return float(np.linalg.eigvalsh(h)[0])


def ground_state_vector(spec: HubbardSpec) -> np.ndarray:
    """First eigenvector of the dense eigensolver (deterministic tie-break)."""
    _check_dense_capacity(spec.qubits)
    h = reconstruct_matrix(build_hubbard_pauli(spec))
    _, vecs = np.linalg.eigh(h)
    return vecs[:, 0]
