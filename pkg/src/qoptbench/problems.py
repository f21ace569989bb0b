"""Problem families: instance generation, Hamiltonians, and exact oracles.

Four families are supported: ``maxcut``, ``numpart`` (number partitioning),
``knapsack`` (value maximization with a quadratic capacity penalty), and
``spinglass`` (random XX+YY+ZZ couplings, the only non-diagonal family).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum, simplify, to_matrix
from .states import StateVector, basis_state

KINDS = ("maxcut", "numpart", "knapsack", "spinglass")
BRUTE_FORCE_QUBIT_LIMIT = 24
EIG_QUBIT_LIMIT = 12


@dataclass(frozen=True)
class ProblemInstance:
    """One generated instance: family tag, size, raw data, and its seed."""

    kind: str
    n: int
    payload: dict
    seed: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}; valid: {KINDS}")
        if self.n < 1:
            raise ValueError("n must be positive")
        check = getattr(self, f"_check_{self.kind}")
        check()

    def _check_maxcut(self):
        edges = self.payload["edges"]
        seen = set()
        for e in edges:
            i, j = e
            if i == j:
                raise ValueError(f"self-loop edge {e}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {e} outside vertex range")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(key)

    def _check_numpart(self):
        if len(self.payload["numbers"]) != self.n:
            raise ValueError("need one number per qubit")
        if any(v < 1 for v in self.payload["numbers"]):
            raise ValueError("numbers must be positive")

    def _check_knapsack(self):
        p = self.payload
        if len(p["weights"]) != self.n or len(p["values"]) != self.n:
            raise ValueError("need one weight and one value per item")
        if any(v < 1 for v in p["weights"]) or any(v < 1 for v in p["values"]):
            raise ValueError("weights and values must be positive integers")
        if p["capacity"] < 1:
            raise ValueError("capacity must be positive")
        if p["penalty"] != 2 * max(p["values"]):
            raise ValueError("penalty must equal 2 * max(values) exactly")

    def _check_spinglass(self):
        for key in ("jx", "jy", "jz"):
            m = np.asarray(self.payload[key], dtype=float)
            if m.shape != (self.n, self.n):
                raise ValueError(f"{key} must be an n-by-n matrix")
            if np.any(np.tril(m) != 0.0):
                raise ValueError(f"{key} must be strictly upper triangular")
            vals = m[np.triu_indices(self.n, k=1)]
            if np.any(np.abs(vals) >= 1.0):
                raise ValueError("couplings must lie strictly inside (-1, 1)")

    # typed payload accessors
    @property
    def edges(self) -> list[tuple[int, int]]:
        return [tuple(e) for e in self.payload["edges"]]

    @property
    def numbers(self) -> np.ndarray:
        return np.asarray(self.payload["numbers"], dtype=np.int64)

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.payload["weights"], dtype=np.int64)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.payload["values"], dtype=np.int64)

    @property
    def capacity(self) -> int:
        return int(self.payload["capacity"])

    @property
    def penalty(self) -> float:
        return float(self.payload["penalty"])

    def couplings(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(
            np.asarray(self.payload[k], dtype=float) for k in ("jx", "jy", "jz")
        )

    @property
    def instance_id(self) -> str:
        return f"{self.kind}-n{self.n}-s{self.seed}"


@dataclass
class GroundTruth:
    """Exact ground data: energy, degeneracy, and an orthonormal ground basis."""

    energy: float
    degeneracy: int
    subspace: list[StateVector]
    optimal_bitstrings: list[str] | None = None


def _zletters(n: int, positions) -> str:
    letters = ["I"] * n
    for q in positions:
        letters[q] = "Z"
    return "".join(letters)


def build_hamiltonian(p: ProblemInstance) -> PauliSum:
    """Cost Hamiltonian of an instance, simplified to canonical form."""
    n = p.n
    if p.kind == "maxcut":
        terms = []
        for i, j in p.edges:
            terms.append((-0.5, "I" * n))
            terms.append((0.5, _zletters(n, (i, j))))
        return simplify(PauliSum.from_terms(n, terms))
    if p.kind == "numpart":
        linear = PauliSum.from_terms(
            n, [(float(v), _zletters(n, (i,))) for i, v in enumerate(p.numbers)]
        )
        return simplify(linear * linear)
    if p.kind == "knapsack":

        def occupancy(i):
            return PauliSum.from_terms(
                n, [(0.5, "I" * n), (0.5, _zletters(n, (i,)))]
            )

        value = PauliSum.zero(n)
        load = PauliSum.zero(n)
        for i in range(n):
            value = value + float(p.values[i]) * occupancy(i)
            load = load + float(p.weights[i]) * occupancy(i)
        deviation = load - PauliSum.identity(n, float(p.capacity))
        return simplify(-1.0 * value + p.penalty * (deviation * deviation))
    if p.kind == "spinglass":
        jx, jy, jz = p.couplings()
        terms = []
        for i in range(n):
            for j in range(i + 1, n):
                for mat, letter in ((jx, "X"), (jy, "Y"), (jz, "Z")):
                    if mat[i, j] != 0.0:
                        letters = ["I"] * n
                        letters[i] = letter
                        letters[j] = letter
                        terms.append((mat[i, j], "".join(letters)))
        return simplify(PauliSum.from_terms(n, terms))
    raise ValueError(f"unknown kind {p.kind!r}")


def gen_maxcut(n: int, edge_probability: float = 0.5, seed: int = 0) -> ProblemInstance:
    """Independent-edge random graph; resamples until at least one edge exists."""
    if n < 2:
        raise ValueError("maxcut needs n >= 2")
    if not 0 < edge_probability <= 1:
        raise ValueError("edge_probability must be in (0, 1]")
    rng = np.random.default_rng(seed)
    while True:
        edges = [
            [i, j]
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < edge_probability
        ]
        if edges:
            break
    return ProblemInstance("maxcut", n, {"edges": edges}, seed)


def gen_numpart(n: int, value_max: int = 100, seed: int = 0) -> ProblemInstance:
    if n < 2:
        raise ValueError("numpart needs n >= 2")
    rng = np.random.default_rng(seed)
    numbers = rng.integers(1, value_max + 1, size=n)
    return ProblemInstance("numpart", n, {"numbers": [int(v) for v in numbers]}, seed)


def gen_knapsack(
    n: int, value_max: int = 50, weight_max: int = 50, seed: int = 0
) -> ProblemInstance:
    """Random items with capacity ceil(sum(w)/2) and penalty 2*max(values).

    The quadratic penalty (load - capacity)^2 is two-sided, so for arbitrary
    items the encoding's ground state can be an exact-capacity fill of lower
    value than the true constrained optimum.  Draws are rejected until the
    encoding is faithful: every unconstrained minimizer must decode to a
    feasible selection attaining the constrained optimum.  This keeps
    Hamiltonian fidelity and solution quality interchangeable downstream.
    """
    if n < 2:
        raise ValueError("knapsack needs n >= 2")
    rng = np.random.default_rng(seed)
    while True:
        values = [int(v) for v in rng.integers(1, value_max + 1, size=n)]
        weights = [int(w) for w in rng.integers(1, weight_max + 1, size=n)]
        payload = {
            "weights": weights,
            "values": values,
            "capacity": math.ceil(sum(weights) / 2),
            "penalty": 2 * max(values),
        }
        inst = ProblemInstance("knapsack", n, payload, seed)
        if _knapsack_encoding_faithful(inst):
            return inst


def _knapsack_encoding_faithful(p: ProblemInstance) -> bool:
    truth = brute_force_classical(p)
    best_feasible = knapsack_constrained_optimum(p)
    for bs in truth.optimal_bitstrings:
        value, load = decode_knapsack_selection(p, bs)
        if load > p.capacity or value != best_feasible:
            return False
    return True


def gen_spinglass(
    n: int,
    mu: float = 0.0,
    sigma: float = 0.3,
    bounds: tuple[float, float] = (-1.0, 1.0),
    seed: int = 0,
) -> ProblemInstance:
    if n < 2:
        raise ValueError("spinglass needs n >= 2")
    lo, hi = bounds
    if not lo < mu < hi:
        raise ValueError("bounds must straddle mu")
    rng = np.random.default_rng(seed)

    def draw():
        while True:
            v = rng.normal(mu, sigma)
            if lo < v < hi:
                return v

    payload = {}
    for key in ("jx", "jy", "jz"):
        m = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                m[i, j] = draw()
        payload[key] = m.tolist()
    return ProblemInstance("spinglass", n, payload, seed)


def _bit_table(n: int) -> np.ndarray:
    """(2**n, n) matrix with B[k, i] = bit i of k."""
    k = np.arange(2**n, dtype=np.int64)
    return (k[:, None] >> np.arange(n)) & 1


def classical_costs(p: ProblemInstance) -> np.ndarray:
    """Exact integer cost of every bitstring, straight from the instance data.

    Independent of the Pauli expansion on purpose: this is the oracle the
    Hamiltonian construction is checked against.
    """
    if p.kind == "spinglass":
        raise ValueError("spin glass has no classical cost function")
    bits = _bit_table(p.n)
    if p.kind == "maxcut":
        e = np.zeros(2**p.n, dtype=np.int64)
        for i, j in p.edges:
            e -= bits[:, i] ^ bits[:, j]
        return e
    if p.kind == "numpart":
        spins = 1 - 2 * bits
        return (spins @ p.numbers) ** 2
    if p.kind == "knapsack":
        q = 1 - bits  # item selected <=> bit 0 (z-eigenvalue +1)
        value = q @ p.values
        load = q @ p.weights
        return -value + int(p.penalty) * (load - p.capacity) ** 2
    raise ValueError(f"unknown kind {p.kind!r}")


def brute_force_classical(p: ProblemInstance) -> GroundTruth:
    """Exhaustive ground truth for the diagonal (classical) families."""
    if p.kind == "spinglass":
        raise ValueError("brute force applies to classical problems only")
    if p.n > BRUTE_FORCE_QUBIT_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_QUBIT_LIMIT} qubits")
    costs = classical_costs(p)
    best = int(costs.min())
    argmins = np.flatnonzero(costs == best)
    bitstrings = [format(int(k), f"0{p.n}b") for k in argmins]
    subspace = [basis_state(p.n, int(k)) for k in argmins]
    return GroundTruth(float(best), len(argmins), subspace, bitstrings)


def exact_ground_subspace(h: PauliSum, degeneracy_tol: float | None = None) -> GroundTruth:
    """Dense eigendecomposition oracle; works for any Hermitian Hamiltonian."""
    if h.n_qubits > EIG_QUBIT_LIMIT:
        raise ValueError(f"dense diagonalization limited to {EIG_QUBIT_LIMIT} qubits")
    m = to_matrix(h)
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    if np.max(np.abs(m - m.conj().T)) > 1e-10 * scale:
        raise ValueError("Hamiltonian is not Hermitian")
    evals, evecs = np.linalg.eigh(m)
    e0 = float(evals[0])
    tol = degeneracy_tol if degeneracy_tol is not None else 1e-9 * max(1.0, abs(e0))
    members = np.flatnonzero(evals <= e0 + tol)
    subspace = [StateVector(h.n_qubits, evecs[:, int(k)]) for k in members]
    return GroundTruth(e0, len(members), subspace, None)


def ground_truth_for(p: ProblemInstance) -> GroundTruth:
    """Brute force for classical kinds, diagonalization for the spin glass."""
    if p.kind == "spinglass":
        return exact_ground_subspace(build_hamiltonian(p))
    return brute_force_classical(p)


def knapsack_constrained_optimum(p: ProblemInstance) -> int:
    """Best total value subject to the capacity, by enumeration."""
    if p.kind != "knapsack":
        raise ValueError("not a knapsack instance")
    bits = _bit_table(p.n)
    q = 1 - bits
    value = q @ p.values
    feasible = (q @ p.weights) <= p.capacity
    return int(value[feasible].max())


def decode_knapsack_selection(p: ProblemInstance, bitstring: str) -> tuple[int, int]:
    """(total value, total weight) of the selection encoded by a bitstring."""
    picks = [i for i in range(p.n) if bitstring[p.n - 1 - i] == "0"]
    return int(p.values[picks].sum()), int(p.weights[picks].sum())


# --- instance files: one self-describing JSON record per line ---


def instance_to_json(p: ProblemInstance) -> str:
    record = {"kind": p.kind, "n": p.n, "payload": p.payload, "seed": p.seed}
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def instance_from_json(line: str) -> ProblemInstance:
    record = json.loads(line)
    return ProblemInstance(
        record["kind"], record["n"], record["payload"], record["seed"]
    )


def write_suite(instances, path):
    with open(path, "w") as fh:
        for inst in instances:
            fh.write(instance_to_json(inst) + "\n")


def read_suite(path) -> list[ProblemInstance]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(instance_from_json(line))
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"bad instance record on line {lineno}") from exc
    return out
