"""Dense complex state vectors: gates, expectations, fidelity, sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliString, PauliSum, zsign_vector

NORM_TOL = 1e-10
ORTHO_TOL = 1e-8
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass
class StateVector:
    """Amplitudes of an ``n_qubits`` register, indexed per the package bit convention."""

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2 ** self.n_qubits} amplitudes, got {self.amps.shape}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())

    def check_normalized(self, tol: float = NORM_TOL):
        if abs(self.norm() - 1.0) > tol:
            raise ValueError(f"state norm {self.norm()} is not 1 within {tol}")


def plus_state(n: int) -> StateVector:
    """Equal superposition over all basis states."""
    if not 1 <= n <= 14:
        raise ValueError(f"qubit count {n} outside supported range [1, 14]")
    return StateVector(n, np.full(2**n, 2 ** (-n / 2), dtype=complex))


def basis_state(n: int, index: int) -> StateVector:
    if not 0 <= index < 2**n:
        raise ValueError("basis index out of range")
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return StateVector(n, amps)


def inner(a: StateVector, b: StateVector) -> complex:
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch")
    return complex(np.vdot(a.amps, b.amps))


def apply_pauli_string(amps: np.ndarray, n: int, p: PauliString) -> np.ndarray:
    """Apply a Pauli string (coefficient included) to raw amplitudes."""
    xmask, zmask, ycount = p.masks()
    src = np.arange(2**n) ^ xmask
    out = amps[src] * (p.coeff * (1j**ycount))
    if zmask:
        out *= zsign_vector(n, zmask)[src]
    return out


def expectation(s: StateVector, h: PauliSum) -> float:
    """Real part of <s|H|s>, evaluated term by term.

    For Hermitian H the imaginary residue is asserted below 1e-10.
    """
    if s.n_qubits != h.n_qubits:
        raise ValueError(
            f"state on {s.n_qubits} qubits, Hamiltonian on {h.n_qubits}"
        )
    total = 0 + 0j
    for t in h.terms:
        total += np.vdot(s.amps, apply_pauli_string(s.amps, s.n_qubits, t))
    if h.is_hermitian() and abs(total.imag) > 1e-10:
        raise AssertionError(
            f"imaginary residue {total.imag} in a Hermitian expectation"
        )
    return float(total.real)


def _apply_single_qubit(amps: np.ndarray, n: int, q: int, m: np.ndarray) -> np.ndarray:
    a = amps.reshape(2 ** (n - 1 - q), 2, 2**q)
    out = np.empty_like(a)
    out[:, 0, :] = m[0, 0] * a[:, 0, :] + m[0, 1] * a[:, 1, :]
    out[:, 1, :] = m[1, 0] * a[:, 0, :] + m[1, 1] * a[:, 1, :]
    return out.reshape(-1)


def _gate_matrix(kind: str, angle: float | None) -> np.ndarray:
    if kind == "h":
        return np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=complex)
    if kind == "ry":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "rz":
        return np.array(
            [[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex
        )
    raise ValueError(f"unknown single-qubit gate {kind!r}")


def apply_gate(
    s: StateVector,
    kind: str,
    targets: tuple[int, ...],
    angle: float | None = None,
    letters: str | None = None,
) -> StateVector:
    """Apply one gate and return the new state.

    Supported kinds: ``h``, ``ry(angle)``, ``rz(angle)``, ``cx(control, target)``
    and ``prot`` = exp(-i * angle * P) for the unit Pauli string ``letters``.
    """
    n = s.n_qubits
    targets = tuple(targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate gate targets {targets}")
    for q in targets:
        if not 0 <= q < n:
            raise ValueError(f"target {q} outside register of {n} qubits")

    if kind in ("h", "ry", "rz"):
        if len(targets) != 1:
            raise ValueError(f"{kind} takes one target")
        return StateVector(n, _apply_single_qubit(s.amps, n, targets[0], _gate_matrix(kind, angle)))
    if kind == "cx":
        if len(targets) != 2:
            raise ValueError("cx takes (control, target)")
        control, target = targets
        idx = np.arange(2**n)
        sel = (idx >> control) & 1 == 1
        out = s.amps.copy()
        out[idx[sel]] = s.amps[idx[sel] ^ (1 << target)]
        return StateVector(n, out)
    if kind == "prot":
        if letters is None or angle is None:
            raise ValueError("prot needs letters and an angle")
        p = PauliString(1.0, letters)
        if p.n_qubits != n:
            raise ValueError("Pauli rotation letters must span the register")
        rotated = math.cos(angle) * s.amps - 1j * math.sin(angle) * apply_pauli_string(
            s.amps, n, p
        )
        return StateVector(n, rotated)
    raise ValueError(f"unknown gate kind {kind!r}")


def fidelity_to_subspace(s: StateVector, basis: list[StateVector]) -> float:
    """Population of ``s`` inside the span of an orthonormal basis."""
    if not basis:
        raise ValueError("empty subspace basis")
    b = np.stack([v.amps for v in basis], axis=1)
    gram = b.conj().T @ b
    if np.max(np.abs(gram - np.eye(len(basis)))) > ORTHO_TOL:
        raise ValueError("subspace basis is not orthonormal")
    overlaps = b.conj().T @ s.amps
    return float(np.sum(np.abs(overlaps) ** 2))


def sample(s: StateVector, shots: int, rng: np.random.Generator) -> dict[str, int]:
    """Multinomial draw from |amplitudes|^2 via inverse CDF.

    Returns a bitstring (``b_{N-1}...b_0``) to count map, deterministic for
    a fixed generator state.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    s.check_normalized()
    probs = np.abs(s.amps) ** 2
    cum = np.cumsum(probs)
    cum /= cum[-1]
    draws = np.searchsorted(cum, rng.random(shots), side="right")
    values, counts = np.unique(draws, return_counts=True)
    n = s.n_qubits
    return {format(int(v), f"0{n}b"): int(c) for v, c in zip(values, counts)}
