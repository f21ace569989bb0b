"""Benchmarking toolkit for quantum and classical heuristics on small
combinatorial optimization problems.

The package provides exact Pauli-sum algebra, a dense statevector simulator,
four seeded problem families with exact oracles, real- and imaginary-time
integrators (with optional bond-dimension truncation), variational drivers
(alternating-layer and hardware-efficient ansatz), two imaginary-time
solvers, simulated annealing, and a benchmarking harness with CSV/SVG
reporting plus a command-line front end.
"""

__version__ = "0.1.0"

from .pauli import PauliString, PauliSum, is_diagonal, mul, simplify, to_matrix
from .states import (
    StateVector,
    apply_gate,
    basis_state,
    expectation,
    fidelity_to_subspace,
    plus_state,
    sample,
)
from .problems import (
    GroundTruth,
    ProblemInstance,
    brute_force_classical,
    build_hamiltonian,
    exact_ground_subspace,
    gen_knapsack,
    gen_maxcut,
    gen_numpart,
    gen_spinglass,
    ground_truth_for,
    read_suite,
    write_suite,
)

__all__ = [
    "PauliString",
    "PauliSum",
    "mul",
    "simplify",
    "to_matrix",
    "is_diagonal",
    "StateVector",
    "plus_state",
    "basis_state",
    "apply_gate",
    "expectation",
    "fidelity_to_subspace",
    "sample",
    "ProblemInstance",
    "GroundTruth",
    "build_hamiltonian",
    "gen_maxcut",
    "gen_numpart",
    "gen_knapsack",
    "gen_spinglass",
    "brute_force_classical",
    "exact_ground_subspace",
    "ground_truth_for",
    "read_suite",
    "write_suite",
]
