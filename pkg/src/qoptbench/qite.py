"""Imaginary-time solvers on circuits (McLachlan flow) and on states
(per-step unitary fitting over a Pauli-string basis).

Either solver can run with a constant problem Hamiltonian or with the
annealing interpolation evaluated at imaginary time.  The ansatz-free
fitting step solves the regularized normal equations
``(S + S^T + lam*I) a = b`` with ``S_IJ = Re<psi|s_I s_J|psi>`` and
``b_I = 2*Im<Delta|s_I|psi>``; for the complete basis the same solution is
obtained in closed form in the 2*2^n-dimensional dual space, which is what
makes full-basis runs affordable.  Tests pin the two routes against each
other.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass

import numpy as np

from .circuits import ParamCircuit, evaluate, state_jacobian, su2_ansatz
from .dynamics import Trajectory, _record_steps, driver_hamiltonian
from .pauli import PauliString, PauliSum, to_matrix
from .problems import GroundTruth
from .states import StateVector, fidelity_to_subspace, plus_state

COMPLETE_BASIS_QUBIT_LIMIT = 8

MODES = ("ansatz_based", "ansatz_free")
SCHEDULE_KINDS = ("constant", "qa")


@dataclass(frozen=True)
class QiteConfig:
    mode: str
    dt: float
    T: float
    schedule_kind: str = "constant"
    lam: float = 1e-6
    basis: tuple[str, ...] | None = None  # ansatz-free; None = complete basis
    circuit: ParamCircuit | None = None  # ansatz-based; None = SU(2) default
    reps: int = 2
    seed: int = 0
    record_every: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.schedule_kind not in SCHEDULE_KINDS:
            raise ValueError(f"schedule_kind must be one of {SCHEDULE_KINDS}")
        if self.dt <= 0 or self.T < self.dt:
            raise ValueError("need dt > 0 and T >= dt")
        steps = self.T / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError(f"T/dt = {steps} is not an integer step count")
        if self.basis is not None:
            seen = set()
            for letters in self.basis:
                p = PauliString(1.0, letters)
                if p.is_identity:
                    raise ValueError("basis must not contain the identity string")
                if letters in seen:
                    raise ValueError(f"duplicate basis string {letters}")
                seen.add(letters)

    @property
    def steps(self) -> int:
        return int(round(self.T / self.dt))


@dataclass
class QiteRunInfo:
    mode: str
    schedule_kind: str
    dt: float
    T: float
    lam: float
    basis_size: int
    parameter_count: int
    seed: int
    final_energy: float
    final_fidelity: float
    wall_time_s: float

    def to_metadata(self) -> dict:
        return dict(self.__dict__)


def complete_pauli_basis(n: int) -> tuple[str, ...]:
    """All 4**n - 1 non-identity strings in lexicographic order."""
    if n > COMPLETE_BASIS_QUBIT_LIMIT:
        raise ValueError(
            f"complete basis limited to {COMPLETE_BASIS_QUBIT_LIMIT} qubits; "
            "pass an explicit basis beyond that"
        )
    return tuple(
        "".join(p)
        for p in itertools.product("IXYZ", repeat=n)
        if set(p) != {"I"}
    )


# ---------------------------------------------------------------------------
# McLachlan (ansatz-based) step


def mclachlan_step(
    c: ParamCircuit, theta, h_now: PauliSum, dt: float, lam: float = 1e-6
):
    """One explicit-Euler update of the circuit parameters."""
    return mclachlan_step_dense(c, theta, to_matrix(h_now), dt, lam)


def mclachlan_step_dense(c: ParamCircuit, theta, h_mat: np.ndarray, dt, lam):
    theta = np.asarray(theta, dtype=float)
    psi = evaluate(c, theta).amps
    jac = state_jacobian(c, theta)
    metric = np.real(jac.conj().T @ jac)
    force = np.real(jac.conj().T @ (h_mat @ psi))
    theta_dot = _solve_regularized(metric, -force, lam)
    return theta + dt * theta_dot


def _solve_regularized(sym: np.ndarray, rhs: np.ndarray, lam: float) -> np.ndarray:
    a = sym + lam * np.eye(sym.shape[0])
    try:
        x = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError:
        x = None
    if x is None or not np.all(np.isfinite(x)):
        x, *_ = np.linalg.lstsq(a, rhs, rcond=1e-10)
        if not np.all(np.isfinite(x)):
            raise RuntimeError("regularized solve produced non-finite update")
    return x


# ---------------------------------------------------------------------------
# Ansatz-free step


class _BasisData:
    """Precomputed application tables for a Pauli-string basis."""

    def __init__(self, n: int, letters: tuple[str, ...]):
        self.n = n
        self.letters = letters
        d = 2**n
        self.dim = d
        self.complete = len(letters) == 4**n - 1 and set(letters) == set(
            complete_pauli_basis(n)
        )
        if self.complete:
            idx = np.arange(d, dtype=np.int64)
            self.xor_grid = idx[:, None] ^ idx[None, :]
            w = np.array([[1.0, 1.0], [1.0, -1.0]])
            full = np.array([[1.0]])
            for _ in range(n):
                full = np.kron(full, w)
            self.walsh = full
            self.yphase = (1j) ** _and_popcount_grid(d)
            self.cols = np.broadcast_to(idx[None, :], (d, d))
        self.phases = None  # general-path tables are built on first use

    def _ensure_general(self):
        if self.phases is not None:
            return
        from .pauli import zsign_vector

        d = self.dim
        strings = [PauliString(1.0, s) for s in self.letters]
        k = len(strings)
        self.phases = np.empty((k, d), dtype=complex)
        self.perm = np.empty((k, d), dtype=np.int64)
        idx = np.arange(d, dtype=np.int64)
        for i, p in enumerate(strings):
            xm, zm, yc = p.masks()
            self.phases[i] = (1j**yc) * zsign_vector(self.n, zm)
            self.perm[i] = idx ^ xm
        self.stack = np.stack([p.to_matrix() for p in strings])

    def columns(self, psi: np.ndarray) -> np.ndarray:
        """(K, d) array whose row I is sigma_I |psi>."""
        self._ensure_general()
        src = self.phases * psi[None, :]
        return np.take_along_axis(src, self.perm, axis=1)


def _and_popcount_grid(d: int) -> np.ndarray:
    idx = np.arange(d, dtype=np.int64)
    grid = idx[:, None] & idx[None, :]
    pop = np.zeros_like(grid)
    g = grid.copy()
    while np.any(g):
        pop += g & 1
        g >>= 1
    return pop


_BASIS_CACHE: dict = {}


def _basis_data(n: int, letters: tuple[str, ...]) -> _BasisData:
    key = (n, letters)
    if key not in _BASIS_CACHE:
        _BASIS_CACHE[key] = _BasisData(n, letters)
    return _BASIS_CACHE[key]


def imaginary_target(psi: np.ndarray, dt: float, evals, evecs) -> np.ndarray:
    """Normalized exp(-dt*H)|psi> from the eigendecomposition of H."""
    w = evecs.conj().T @ psi
    w = np.exp(-dt * (evals - evals[0])) * w
    out = evecs @ w
    return out / np.linalg.norm(out)


def ansatz_free_step(
    s: StateVector,
    h_now: PauliSum,
    dt: float,
    basis: tuple[str, ...] | None = None,
    lam: float = 1e-6,
) -> StateVector:
    """Fit one unitary exp(-i*dt*A) to the exact imaginary-time step."""
    n = s.n_qubits
    letters = basis if basis is not None else complete_pauli_basis(n)
    data = _basis_data(n, tuple(letters))
    evals, evecs = np.linalg.eigh(to_matrix(h_now))
    return _ansatz_free_step_impl(s, dt, data, lam, evals, evecs)


def _ansatz_free_step_impl(
    s: StateVector, dt, data: _BasisData, lam, evals, evecs
) -> StateVector:
    psi = s.amps
    target = imaginary_target(psi, dt, evals, evecs)
    delta = (target - psi) / dt
    if data.complete:
        a_matrix = _fit_complete(psi, delta, data, lam)
    else:
        a_matrix = _fit_general(psi, delta, data, lam)
    a_matrix = 0.5 * (a_matrix + a_matrix.conj().T)
    aev, avec = np.linalg.eigh(a_matrix)
    out = avec @ (np.exp(-1j * dt * aev) * (avec.conj().T @ psi))
    out /= np.linalg.norm(out)
    return StateVector(s.n_qubits, out)


def _fit_general(psi, delta, data: _BasisData, lam) -> np.ndarray:
    """Literal normal equations (S + S^T + lam I) a = 2 Im<Delta|s_I|psi>."""
    data._ensure_general()
    sb = data.columns(psi)
    s_re = np.real(sb.conj() @ sb.T)
    b = 2.0 * np.imag(sb @ delta.conj())
    coeffs = _solve_regularized(s_re + s_re.T, b, lam)
    return np.tensordot(coeffs, data.stack, axes=1)


def _fit_complete(psi, delta, data: _BasisData, lam) -> np.ndarray:
    """Same regularized solution in the dual space, closed form.

    The map T: a -> i * sum_I a_I s_I |psi> over the complete non-identity
    basis has T T^T = (d/2) P_perp + (d-1) P_{i psi} + 0 * P_psi in the real
    geometry of C^d, so the ridge dual solve is three scalar divisions.
    """
    d = data.dim
    mu = 0.5 * lam
    rho = np.vdot(psi, delta)
    delta_perp = delta - rho.real * psi - rho.imag * (1j * psi)
    u = -(delta_perp / (d / 2.0 + mu) + (rho.imag / (d - 1.0 + mu)) * (1j * psi))
    m1 = psi.conj()[None, :] * u[data.xor_grid]
    c2 = m1 @ data.walsh
    a = np.imag(data.yphase.conj() * c2)
    a[0, 0] = 0.0  # identity string is not in the basis
    v = (a * data.yphase) @ data.walsh
    a_matrix = np.zeros((d, d), dtype=complex)
    a_matrix[data.xor_grid, data.cols] = v
    return a_matrix


# ---------------------------------------------------------------------------
# Full runs


def run_qite(
    h_prob: PauliSum,
    cfg: QiteConfig,
    truth: GroundTruth | None = None,
) -> tuple[Trajectory, QiteRunInfo]:
    """Evolve |+...+> for imaginary time T and record energy/fidelity traces.

    ``schedule_kind="constant"`` keeps the problem Hamiltonian throughout;
    ``"qa"`` interpolates from the transverse-field driver exactly as the
    annealing schedule does, evaluated at imaginary time.
    """
    n = h_prob.n_qubits
    started = time.perf_counter()
    steps = cfg.steps
    cadence = _record_steps(steps, cfg.record_every)
    hp_mat = to_matrix(h_prob)
    hd_mat = to_matrix(driver_hamiltonian(n)) if cfg.schedule_kind == "qa" else None

    def h_mat_at(tau: float) -> np.ndarray:
        if cfg.schedule_kind == "constant":
            return hp_mat
        frac = tau / cfg.T
        return frac * hp_mat + (1.0 - frac) * hd_mat

    times, energies, fidelities = [], [], []

    def record(k, psi):
        tau = k * cfg.dt
        times.append(tau)
        energies.append(float(np.real(np.vdot(psi, h_mat_at(tau) @ psi))))
        if truth is None:
            fidelities.append(float("nan"))
        else:
            fidelities.append(
                fidelity_to_subspace(StateVector(n, psi), truth.subspace)
            )

    if cfg.mode == "ansatz_based":
        circuit = cfg.circuit or su2_ansatz(n, cfg.reps)
        rng = np.random.default_rng(cfg.seed)
        theta = rng.uniform(-1e-2, 1e-2, circuit.parameter_count)
        psi = evaluate(circuit, theta).amps
        record(0, psi)
        for k in range(steps):
            tau = k * cfg.dt
            theta = np.asarray(
                mclachlan_step_dense(circuit, theta, h_mat_at(tau), cfg.dt, cfg.lam)
            )
            if k % cadence == cadence - 1 or k == steps - 1:
                psi = evaluate(circuit, theta).amps
                record(k + 1, psi)
        final = StateVector(n, evaluate(circuit, theta).amps)
        basis_size = 0
        parameter_count = circuit.parameter_count
    else:
        letters = cfg.basis if cfg.basis is not None else complete_pauli_basis(n)
        data = _basis_data(n, tuple(letters))
        state = plus_state(n)
        record(0, state.amps)
        const_eig = None
        if cfg.schedule_kind == "constant":
            const_eig = np.linalg.eigh(hp_mat)
        for k in range(steps):
            tau = k * cfg.dt
            if const_eig is not None:
                evals, evecs = const_eig
            else:
                evals, evecs = np.linalg.eigh(h_mat_at(tau))
            state = _ansatz_free_step_impl(state, cfg.dt, data, cfg.lam, evals, evecs)
            if k % cadence == cadence - 1 or k == steps - 1:
                record(k + 1, state.amps)
        final = state
        basis_size = len(letters)
        parameter_count = 0

    traj = Trajectory(
        np.array(times), np.array(energies), np.array(fidelities), final
    )
    info = QiteRunInfo(
        mode=cfg.mode,
        schedule_kind=cfg.schedule_kind,
        dt=cfg.dt,
        T=cfg.T,
        lam=cfg.lam,
        basis_size=basis_size,
        parameter_count=parameter_count,
        seed=cfg.seed,
        final_energy=float(traj.energies[-1]),
        final_fidelity=float(traj.fidelities[-1]),
        wall_time_s=time.perf_counter() - started,
    )
    return traj, info


def write_trajectory(traj: Trajectory, info: QiteRunInfo, path):
    """Trajectory CSV plus a JSON metadata sidecar at ``path + '.meta.json'``."""
    traj.to_csv(path)
    with open(f"{path}.meta.json", "w") as fh:
        json.dump(info.to_metadata(), fh, sort_keys=True, indent=2)
        fh.write("\n")
