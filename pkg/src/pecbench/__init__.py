"""Shot-budget-aware benchmarking of ground-state energy estimation.

Given a lattice Hamiltonian, classically certified energy bounds, a layered
depolarizing-noise model and a shot budget, the toolkit computes the
confidence of landing inside the certified interval with and without
probabilistic error cancellation, classifies the (noise, shots) plane into
winning-strategy regimes, and validates the analytic formulas against
brute-force and Monte Carlo oracles at small scale.
"""

__version__ = "0.1.0"
