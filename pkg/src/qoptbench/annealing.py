"""Classical simulated annealing over diagonal Hamiltonians with shot statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .pauli import PauliSum, is_diagonal, simplify
from .problems import GroundTruth


@dataclass(frozen=True)
class SaConfig:
    sweeps: int = 10000
    shots: int = 1000
    t_hot: float | None = None  # None: calibrated from random probes
    t_cold: float | None = None
    seed: int = 0
    diagonal_part: bool = False  # escape hatch for non-diagonal Hamiltonians

    def __post_init__(self):
        if self.sweeps < 1 or self.shots < 1:
            raise ValueError("sweeps and shots must be >= 1")
        if self.t_hot is not None and self.t_cold is not None:
            if not self.t_hot > self.t_cold > 0:
                raise ValueError("need t_hot > t_cold > 0")


def ising_form(h: PauliSum) -> tuple[float, np.ndarray, np.ndarray]:
    """Split a diagonal sum into constant, field, and pair-coupling parts.

    The cost of spin configuration s (s_i = +1 for bit 0) is
    ``const + h.s + sum_{i<j} J_ij s_i s_j``.  Z-strings of weight above two
    are rejected; none of the built-in problem families produce them.
    """
    if not is_diagonal(h):
        raise ValueError("annealing needs a diagonal Hamiltonian")
    n = h.n_qubits
    const = 0.0
    field = np.zeros(n)
    coupling = np.zeros((n, n))
    for t in simplify(h).terms:
        sites = [i for i, c in enumerate(t.letters) if c == "Z"]
        coeff = t.coeff.real
        if len(sites) == 0:
            const += coeff
        elif len(sites) == 1:
            field[sites[0]] += coeff
        elif len(sites) == 2:
            coupling[sites[0], sites[1]] += coeff
        else:
            raise ValueError("annealing supports at most two-body Z terms")
    return const, field, coupling


def _probe_flip_magnitudes(field, coupling, n, probes, rng):
    """|dE| samples of single flips from random configurations."""
    mags = []
    for _ in range(probes):
        spins = rng.integers(0, 2, size=n) * 2.0 - 1.0
        local = field + coupling @ spins + coupling.T @ spins
        mags.extend(np.abs(2.0 * spins * local))
    return np.asarray(mags)


def _temperature_ladder(cfg: SaConfig, field, coupling, n, rng) -> np.ndarray:
    t_hot, t_cold = cfg.t_hot, cfg.t_cold
    if t_hot is None or t_cold is None:
        mags = _probe_flip_magnitudes(field, coupling, n, 100, rng)
        nonzero = mags[mags > 0]
        if t_hot is None:
            t_hot = float(mags.max()) if mags.max() > 0 else 1.0
        if t_cold is None:
            t_cold = 1e-3 * float(nonzero.mean()) if nonzero.size else 1e-3
        t_cold = min(t_cold, 0.5 * t_hot)
    if cfg.sweeps == 1:
        return np.array([t_hot])
    ratio = (t_cold / t_hot) ** (1.0 / (cfg.sweeps - 1))
    return t_hot * ratio ** np.arange(cfg.sweeps)


def sa_solve(
    h: PauliSum, cfg: SaConfig, truth: GroundTruth | None = None
) -> tuple[dict[str, int], float, float]:
    """Anneal shots from random starts; returns (counts, success fraction, best energy).

    Success counts shots whose final configuration attains the exact optimum
    energy, so it needs ``truth``; without it the success fraction is NaN.
    Non-diagonal Hamiltonians are refused unless ``cfg.diagonal_part`` keeps
    only the Z..Z terms (the caller is responsible for labeling such runs).
    """
    work = h
    if not is_diagonal(h):
        if not cfg.diagonal_part:
            raise ValueError(
                "Hamiltonian is not diagonal; annealing is undefined "
                "(set diagonal_part=True to anneal only the Z terms)"
            )
        work = PauliSum(
            h.n_qubits, tuple(t for t in simplify(h).terms if t.is_diagonal())
        )
    const, field, coupling = ising_form(work)
    n = h.n_qubits
    rng = np.random.default_rng(cfg.seed)
    temps = _temperature_ladder(cfg, field, coupling, n, rng)

    counts: dict[str, int] = {}
    best = np.inf
    hits = 0
    for _ in range(cfg.shots):
        bits = rng.integers(0, 2, size=n).astype(np.int8)
        uniforms = rng.random(cfg.sweeps * n)
        energy = _kernels.sa_shot(bits, field, coupling, temps, uniforms) + const
        key = "".join(str(b) for b in bits[::-1])  # b_{N-1}...b_0
        counts[key] = counts.get(key, 0) + 1
        best = min(best, energy)
        if truth is not None and energy <= truth.energy + 1e-9:
            hits += 1
    success = hits / cfg.shots if truth is not None else float("nan")
    return counts, success, float(best)
