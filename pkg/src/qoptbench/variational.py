"""End-to-end variational drivers for the alternating-layer and SU(2) ansatz."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import (
    evaluate,
    qaoa_state_dense,
    qaoa_state_from_diag,
    su2_ansatz,
)
from .optimizers import OptResult, simplex_minimize, spsa_minimize
from .pauli import PauliSum, diagonal_energies, is_diagonal, to_matrix
from .states import StateVector, plus_state

OPTIMIZERS = ("spsa", "simplex")


@dataclass(frozen=True)
class VariationalConfig:
    algorithm: str = "qaoa"  # "qaoa" or "vqe"
    p: int = 100
    reps: int = 2
    optimizer: str | None = None  # default: simplex for qaoa, spsa for vqe
    budget: int = 5000  # objective evaluations
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ("qaoa", "vqe"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.p < 0 or self.reps < 1 or self.budget < 1:
            raise ValueError("need p >= 0, reps >= 1, budget >= 1")
        if self.optimizer is not None and self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}")


def _minimize(objective, theta0, optimizer: str, budget: int, seed: int) -> OptResult:
    if optimizer == "spsa":
        return spsa_minimize(
            objective,
            theta0,
            max_iter=max(1, budget // 2),
            rng=np.random.default_rng(seed),
        )
    return simplex_minimize(objective, theta0, max_iter=budget)


def qaoa_ramp_init(p: int) -> np.ndarray:
    """Annealing-like start: gamma ramps up, beta ramps down, concatenated."""
    k = np.arange(1, p + 1)
    return np.concatenate([0.5 * k / p, 0.5 * (1.0 - k / p)])


def run_qaoa(h_prob: PauliSum, cfg: VariationalConfig) -> tuple[OptResult, StateVector]:
    """Optimize the alternating-layer energy; returns the best parameters' state.

    Diagonal Hamiltonians get the exact phase separator.  Non-diagonal ones
    (the spin glass) use a dense eigenbasis exponential, which is exact at
    this scale but is flagged in run metadata by the caller.
    """
    n = h_prob.n_qubits
    p = cfg.p
    if p == 0:
        state = plus_state(n)
        value = _energy(h_prob, state)
        res = OptResult(np.zeros(0), value, 1, 0, [(1, value)])
        return res, state

    if is_diagonal(h_prob):
        diag = diagonal_energies(h_prob)

        def make_state(theta):
            return qaoa_state_from_diag(diag, n, theta[:p], theta[p:])

        def objective(theta):
            amps = make_state(theta).amps
            return float(np.real(np.vdot(amps, diag * amps)))

    else:
        evals, evecs = np.linalg.eigh(to_matrix(h_prob))

        def make_state(theta):
            return qaoa_state_dense(evals, evecs, n, theta[:p], theta[p:])

        def objective(theta):
            amps = make_state(theta).amps
            proj = evecs.conj().T @ amps
            return float(np.real(np.vdot(proj, evals * proj)))

    optimizer = cfg.optimizer or "simplex"
    result = _minimize(objective, qaoa_ramp_init(p), optimizer, cfg.budget, cfg.seed)
    return result, make_state(result.best_theta)


def run_vqe(h_prob: PauliSum, cfg: VariationalConfig) -> tuple[OptResult, StateVector]:
    """Minimize the SU(2)-ansatz energy, starting near the equal superposition."""
    n = h_prob.n_qubits
    circuit = su2_ansatz(n, cfg.reps)
    hmat = to_matrix(h_prob)

    def objective(theta):
        amps = evaluate(circuit, theta).amps
        return float(np.real(np.vdot(amps, hmat @ amps)))

    rng = np.random.default_rng(cfg.seed)
    theta0 = rng.uniform(-1e-2, 1e-2, circuit.parameter_count)
    optimizer = cfg.optimizer or "spsa"
    result = _minimize(objective, theta0, optimizer, cfg.budget, cfg.seed + 1)
    return result, evaluate(circuit, result.best_theta)


def _energy(h: PauliSum, state: StateVector) -> float:
    amps = state.amps
    return float(np.real(np.vdot(amps, to_matrix(h) @ amps)))
