"""Parameterized ansatz circuits: QAOA layers and the hardware-efficient SU(2) form."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .pauli import PauliSum, diagonal_energies, is_diagonal
from .states import StateVector, apply_gate, basis_state, plus_state

_KERNEL_CODES = {"h": _kernels.GATE_H, "ry": _kernels.GATE_RY, "rz": _kernels.GATE_RZ, "cx": _kernels.GATE_CX}


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    param: int | None = None
    angle: float | None = None
    letters: str | None = None


@dataclass(frozen=True)
class ParamCircuit:
    """A fixed gate sequence applied to |0...0>, with indexed parameters."""

    n_qubits: int
    gates: tuple[Gate, ...]
    parameter_count: int
    _compiled: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        used = set()
        for g in self.gates:
            if len(set(g.targets)) != len(g.targets):
                raise ValueError(f"duplicate targets in gate {g}")
            for q in g.targets:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"gate target {q} out of range")
            if g.param is not None:
                if not 0 <= g.param < self.parameter_count:
                    raise ValueError(
                        f"parameter index {g.param} >= count {self.parameter_count}"
                    )
                used.add(g.param)
            elif g.kind in ("ry", "rz", "prot") and g.angle is None:
                raise ValueError(f"gate {g.kind} needs a parameter or a fixed angle")
        missing = set(range(self.parameter_count)) - used
        if missing:
            raise ValueError(f"unused parameter indices: {sorted(missing)}")
        object.__setattr__(self, "_compiled", self._compile())

    def _compile(self):
        """Flatten to arrays for the compiled evaluator; None if unsupported gates."""
        if any(g.kind not in _KERNEL_CODES for g in self.gates):
            return None
        m = len(self.gates)
        codes = np.empty(m, dtype=np.int64)
        q0 = np.zeros(m, dtype=np.int64)
        q1 = np.zeros(m, dtype=np.int64)
        pidx = np.full(m, -1, dtype=np.int64)
        fixed = np.zeros(m, dtype=np.float64)
        for i, g in enumerate(self.gates):
            codes[i] = _KERNEL_CODES[g.kind]
            q0[i] = g.targets[0]
            if len(g.targets) > 1:
                q1[i] = g.targets[1]
            if g.param is not None:
                pidx[i] = g.param
            elif g.angle is not None:
                fixed[i] = g.angle
        return codes, q0, q1, pidx, fixed


def evaluate(c: ParamCircuit, theta) -> StateVector:
    """Run the circuit from |0...0> at the given parameter values."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (c.parameter_count,):
        raise ValueError(
            f"expected {c.parameter_count} parameters, got shape {theta.shape}"
        )
    if c._compiled is not None:
        amps = np.zeros(2**c.n_qubits, dtype=complex)
        amps[0] = 1.0
        _kernels.apply_circuit(*c._compiled, theta, amps)
        return StateVector(c.n_qubits, amps)
    return _evaluate_numpy(c, theta)


def _evaluate_numpy(c: ParamCircuit, theta) -> StateVector:
    """Reference evaluator built on single-gate application."""
    state = basis_state(c.n_qubits, 0)
    for g in c.gates:
        ang = theta[g.param] if g.param is not None else g.angle
        state = apply_gate(state, g.kind, g.targets, angle=ang, letters=g.letters)
    return state


def evaluate_batch(c: ParamCircuit, thetas: np.ndarray) -> np.ndarray:
    """Amplitudes for every parameter row; rows are final states."""
    thetas = np.ascontiguousarray(thetas, dtype=float)
    if c._compiled is not None:
        out = np.zeros((thetas.shape[0], 2**c.n_qubits), dtype=complex)
        out[:, 0] = 1.0
        _kernels.apply_circuit_batch(*c._compiled, thetas, out)
        return out
    return np.stack([evaluate(c, row).amps for row in thetas])


def state_jacobian(c: ParamCircuit, theta, eps: float = 1e-6) -> np.ndarray:
    """Central-difference derivatives of the raw amplitudes, one column per parameter."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    theta = np.asarray(theta, dtype=float)
    p = c.parameter_count
    shifts = np.repeat(theta[None, :], 2 * p, axis=0)
    for j in range(p):
        shifts[2 * j, j] += eps
        shifts[2 * j + 1, j] -= eps
    states = evaluate_batch(c, shifts)
    return (states[0::2] - states[1::2]).T / (2.0 * eps)


def su2_ansatz(n: int, reps: int) -> ParamCircuit:
    """Hadamard wall, then ``reps`` blocks of RY/RZ rotations with a CX chain,
    and a final RY/RZ layer.  Parameter count is 2*n*(reps+1)."""
    if n < 2:
        raise ValueError("ansatz needs at least 2 qubits")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    gates = [Gate("h", (q,)) for q in range(n)]
    for r in range(reps):
        base = 2 * n * r
        gates += [Gate("ry", (q,), param=base + q) for q in range(n)]
        gates += [Gate("rz", (q,), param=base + n + q) for q in range(n)]
        gates += [Gate("cx", (q, q + 1)) for q in range(n - 1)]
    base = 2 * n * reps
    gates += [Gate("ry", (q,), param=base + q) for q in range(n)]
    gates += [Gate("rz", (q,), param=base + n + q) for q in range(n)]
    return ParamCircuit(n, tuple(gates), 2 * n * (reps + 1))


def qaoa_state(h_prob: PauliSum, gammas, betas) -> StateVector:
    """Alternating-layer state for a diagonal problem Hamiltonian.

    The phase separator is applied exactly as a diagonal multiply; each
    mixer layer is exp(-i * beta * sum_i X_i).
    """
    if not is_diagonal(h_prob):
        raise ValueError("qaoa_state needs a diagonal problem Hamiltonian")
    gammas = np.asarray(gammas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    if gammas.shape != betas.shape or gammas.ndim != 1:
        raise ValueError("gamma and beta arrays must have equal length")
    return qaoa_state_from_diag(diagonal_energies(h_prob), h_prob.n_qubits, gammas, betas)


def qaoa_state_from_diag(diag: np.ndarray, n: int, gammas, betas) -> StateVector:
    state = plus_state(n)
    _kernels.qaoa_layers(
        np.asarray(diag, dtype=float),
        np.asarray(gammas, dtype=float),
        np.asarray(betas, dtype=float),
        n,
        state.amps,
    )
    return state


def qaoa_state_dense(eigvals, eigvecs, n: int, gammas, betas) -> StateVector:
    """QAOA layers for a non-diagonal Hamiltonian given its eigendecomposition."""
    state = plus_state(n)
    _kernels.qaoa_layers_dense(
        np.ascontiguousarray(eigvecs),
        np.ascontiguousarray(eigvecs.conj().T),
        np.asarray(eigvals, dtype=float),
        np.asarray(gammas, dtype=float),
        np.asarray(betas, dtype=float),
        n,
        state.amps,
    )
    return state
