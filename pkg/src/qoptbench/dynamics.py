"""Real- and imaginary-time integration of Pauli-sum Hamiltonians.

Schedules are linear combinations of fixed Pauli sums with time-dependent
coefficients, which covers constant Hamiltonians and the annealing
interpolation.  Both integrators are classic fourth-order Runge-Kutta with
stage-time Hamiltonian evaluation; the imaginary-time flow is the
norm-preserving form  dpsi/dt = -(H - <H>) psi  with renormalization after
every step.  A bond-dimension truncation hook turns either imaginary-time
run into "tensor-network mode".
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .pauli import PauliSum, simplify, to_matrix
from .problems import GroundTruth
from .states import StateVector, fidelity_to_subspace

IMAG_STEP_HARD_GUARD = 1.0  # hard limit on |<H>| * dt per step
IMAG_STEP_WARN = 0.1  # smoothness guideline
REAL_NORM_DRIFT_TOL = 1e-6


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Schedule:
    """Time-dependent Hamiltonian H(t) = sum_k c_k(t) * H_k on [0, T]."""

    duration: float
    parts: tuple[tuple[Callable[[float], float], PauliSum], ...]
    tag: str = "custom"

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if not self.parts:
            raise ValueError("schedule needs at least one part")
        n = self.parts[0][1].n_qubits
        if any(h.n_qubits != n for _, h in self.parts):
            raise ValueError("all schedule parts must share the qubit count")

    @property
    def n_qubits(self) -> int:
        return self.parts[0][1].n_qubits

    def hamiltonian_at(self, t: float) -> PauliSum:
        total = PauliSum.zero(self.n_qubits)
        for coef_fn, h in self.parts:
            total = total + coef_fn(t) * h
        return simplify(total)


def constant_schedule(h: PauliSum, duration: float) -> Schedule:
    return Schedule(duration, (((lambda t: 1.0), h),), tag="constant")


def driver_hamiltonian(n: int) -> PauliSum:
    """Transverse-field driver -sum_i X_i, whose ground state is |+...+>."""
    terms = []
    for i in range(n):
        letters = ["I"] * n
        letters[i] = "X"
        terms.append((-1.0, "".join(letters)))
    return simplify(PauliSum.from_terms(n, terms))


def qa_schedule(h_prob: PauliSum, duration: float) -> Schedule:
    """Linear interpolation from the driver at t=0 to the problem at t=T."""
    h_d = driver_hamiltonian(h_prob.n_qubits)
    parts = (
        ((lambda t: 1.0 - t / duration), h_d),
        ((lambda t: t / duration), h_prob),
    )
    return Schedule(duration, parts, tag="qa")


@dataclass
class Trajectory:
    """Sampled observables along one evolution, plus the final state."""

    times: np.ndarray
    energies: np.ndarray
    fidelities: np.ndarray
    final_state: StateVector

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("t,energy,fidelity\n")
            for t, e, f in zip(self.times, self.energies, self.fidelities):
                fh.write(f"{t!r},{e!r},{f!r}\n")


@dataclass
class _CompiledSchedule:
    """Dense matrices of the schedule parts for fast application."""

    coef_fns: list
    matrices: list
    duration: float

    @classmethod
    def build(cls, sched: Schedule):
        return cls(
            [fn for fn, _ in sched.parts],
            [to_matrix(h) for _, h in sched.parts],
            sched.duration,
        )

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        out = self.coef_fns[0](t) * (self.matrices[0] @ psi)
        for fn, m in zip(self.coef_fns[1:], self.matrices[1:]):
            out += fn(t) * (m @ psi)
        return out

    def energy(self, t: float, psi: np.ndarray) -> float:
        return float(np.real(np.vdot(psi, self.apply(t, psi))))


def _as_schedule(sched_or_sum, duration) -> Schedule:
    if isinstance(sched_or_sum, PauliSum):
        if duration is None:
            raise ValueError("a constant Hamiltonian needs an explicit duration")
        return constant_schedule(sched_or_sum, duration)
    return sched_or_sum


def _step_count(duration: float, dt: float) -> int:
    if dt <= 0:
        raise ValueError("dt must be positive")
    steps = duration / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise ValueError(f"T/dt = {steps} is not an integer step count")
    return int(round(steps))


def _fidelity(psi: np.ndarray, n: int, truth: GroundTruth | None) -> float:
    if truth is None:
        return float("nan")
    return fidelity_to_subspace(StateVector(n, psi), truth.subspace)


def truncate_bond_dimension(s: StateVector, chi: int) -> tuple[StateVector, float]:
    """Truncate every left/right bipartition to at most ``chi`` Schmidt values.

    Sweeps cuts left to right starting after qubit 0, renormalizes, and also
    returns the total discarded squared Schmidt weight.  Cuts whose maximal
    rank is already <= chi are skipped exactly.
    """
    if chi < 1:
        raise ValueError("chi must be >= 1")
    n = s.n_qubits
    amps = s.amps.copy()
    discarded = 0.0
    for cut in range(n - 1):
        rows = 2 ** (n - 1 - cut)  # qubits above the cut
        cols = 2 ** (cut + 1)  # qubits up to and including the cut
        if min(rows, cols) <= chi:
            continue
        mat = amps.reshape(rows, cols)
        u, sv, vh = np.linalg.svd(mat, full_matrices=False)
        discarded += float(np.sum(sv[chi:] ** 2))
        mat = (u[:, :chi] * sv[:chi]) @ vh[:chi]
        amps = mat.reshape(-1)
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise IntegrationError("truncation annihilated the state")
    return StateVector(n, amps / norm), discarded


def _record_steps(steps: int, record_every: int | None) -> int:
    if record_every is not None:
        return max(1, record_every)
    return max(1, steps // 1000)


def real_time_evolve(
    sched: Schedule,
    s0: StateVector,
    dt: float,
    truth: GroundTruth | None = None,
    record_every: int | None = None,
) -> Trajectory:
    """Integrate i dpsi/dt = H(t) psi to t=T; norm drift beyond 1e-6 raises."""
    s0.check_normalized()
    comp = _CompiledSchedule.build(sched)
    steps = _step_count(sched.duration, dt)
    cadence = _record_steps(steps, record_every)
    n = s0.n_qubits
    psi = s0.amps.astype(complex).copy()

    times, energies, fidelities = [], [], []

    def record(k):
        t = k * dt
        times.append(t)
        energies.append(comp.energy(t, psi) / float(np.real(np.vdot(psi, psi))))
        fidelities.append(_fidelity(psi, n, truth))

    def rhs(t, y):
        return -1j * comp.apply(t, y)

    record(0)
    for k in range(steps):
        t = k * dt
        k1 = rhs(t, psi)
        k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2)
        k4 = rhs(t + dt, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(psi.view(float))):
            raise IntegrationError("non-finite amplitudes during real-time evolution")
        if k % cadence == cadence - 1 or k == steps - 1:
            record(k + 1)

    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    if drift > REAL_NORM_DRIFT_TOL:
        raise IntegrationError(
            f"norm drift {drift:.3e} exceeds {REAL_NORM_DRIFT_TOL:.0e}; decrease dt"
        )
    final = StateVector(n, psi / np.linalg.norm(psi))
    return Trajectory(np.array(times), np.array(energies), np.array(fidelities), final)


def imag_time_evolve(
    sched_or_sum,
    s0: StateVector,
    dt: float,
    T: float | None = None,
    truth: GroundTruth | None = None,
    record_every: int | None = None,
    bond_dim: int | None = None,
) -> Trajectory:
    """Integrate the normalized imaginary-time flow to tau=T.

    Accepts a Schedule or a constant PauliSum (then ``T`` is required).  Every
    step enforces |<H>|*dt <= 1 and warns once above the 0.1 smoothness
    guideline.  With ``bond_dim`` set, the state is truncated to that bond
    dimension after every step (tensor-network mode).
    """
    sched = _as_schedule(sched_or_sum, T)
    s0.check_normalized()
    comp = _CompiledSchedule.build(sched)
    steps = _step_count(sched.duration, dt)
    cadence = _record_steps(steps, record_every)
    n = s0.n_qubits
    psi = s0.amps.astype(complex).copy()
    warned = False

    times, energies, fidelities = [], [], []

    def record(k):
        t = k * dt
        times.append(t)
        energies.append(comp.energy(t, psi))
        fidelities.append(_fidelity(psi, n, truth))

    def rhs(t, y):
        hy = comp.apply(t, y)
        mean = np.real(np.vdot(y, hy)) / np.real(np.vdot(y, y))
        return -(hy - mean * y)

    record(0)
    for k in range(steps):
        t = k * dt
        hpsi = comp.apply(t, psi)
        mean = float(np.real(np.vdot(psi, hpsi)))
        guard = abs(mean) * dt
        if guard > IMAG_STEP_HARD_GUARD:
            raise IntegrationError(
                f"|<H>|*dt = {guard:.3g} exceeds {IMAG_STEP_HARD_GUARD}; decrease dt"
            )
        if guard > IMAG_STEP_WARN and not warned:
            warnings.warn(
                f"|<H>|*dt = {guard:.3g} above the {IMAG_STEP_WARN} smoothness "
                "guideline; energy traces may oscillate",
                stacklevel=2,
            )
            warned = True
        k1 = -(hpsi - mean * psi)
        k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2)
        k4 = rhs(t + dt, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(psi.view(float))):
            raise IntegrationError("non-finite amplitudes during imaginary-time evolution")
        psi /= np.linalg.norm(psi)
        if bond_dim is not None:
            truncated, _ = truncate_bond_dimension(StateVector(n, psi), bond_dim)
            psi = truncated.amps
        if k % cadence == cadence - 1 or k == steps - 1:
            record(k + 1)

    return Trajectory(
        np.array(times), np.array(energies), np.array(fidelities), StateVector(n, psi)
    )
