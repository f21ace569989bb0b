"""Exact algebra of Pauli strings and weighted Pauli sums.

Conventions shared by every module in this package:

* ``letters[i]`` is the single-qubit operator on qubit ``i``.
* Basis index ``k`` encodes ``|b_{N-1} ... b_1 b_0>`` with qubit 0 in the
  least significant bit: ``b_i = (k >> i) & 1``.
* ``sigma_z |0> = +|0>``, i.e. bit value 0 means z-eigenvalue +1.  Every
  decoder in the package (cut partitions, knapsack selections) relies on
  this single convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VALID_LETTERS = "IXYZ"
DROP_TOL = 1e-12
DENSE_QUBIT_LIMIT = 14

_SINGLE_MATRIX = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Products of distinct non-identity letters; identity and involution are
# handled in code.  XY = iZ, YX = -iZ and cyclic.
_CROSS = {
    ("X", "Y"): ("Z", 1j),
    ("Y", "X"): ("Z", -1j),
    ("Y", "Z"): ("X", 1j),
    ("Z", "Y"): ("X", -1j),
    ("Z", "X"): ("Y", 1j),
    ("X", "Z"): ("Y", -1j),
}


@dataclass(frozen=True)
class PauliString:
    """A weighted tensor product of single-qubit Pauli operators."""

    coeff: complex
    letters: str

    def __post_init__(self):
        if not self.letters:
            raise ValueError("letters must cover at least one qubit")
        bad = set(self.letters) - set(VALID_LETTERS)
        if bad:
            raise ValueError(f"invalid Pauli letters: {sorted(bad)}")
        object.__setattr__(self, "coeff", complex(self.coeff))

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    def is_diagonal(self) -> bool:
        return all(c in "IZ" for c in self.letters)

    def scaled(self, factor: complex) -> "PauliString":
        return PauliString(self.coeff * factor, self.letters)

    def masks(self) -> tuple[int, int, int]:
        """Return (xmask, zmask, y_count) of the letter array.

        The string acts on a basis state as
        ``P |b> = i**y_count * (-1)**popcount(b & zmask) |b XOR xmask>``
        (coefficient excluded).
        """
        x = z = y = 0
        for i, c in enumerate(self.letters):
            if c in "XY":
                x |= 1 << i
            if c in "ZY":
                z |= 1 << i
            if c == "Y":
                y += 1
        return x, z, y

    def to_matrix(self) -> np.ndarray:
        _check_dense(self.n_qubits)
        m = np.array([[1.0 + 0j]])
        for i in reversed(range(self.n_qubits)):
            m = np.kron(m, _SINGLE_MATRIX[self.letters[i]])
        return self.coeff * m

    def __mul__(self, other: "PauliString") -> "PauliString":
        return mul(self, other)

    def __repr__(self) -> str:
        return f"PauliString({self.coeff!r}, {self.letters!r})"


def mul(a: PauliString, b: PauliString) -> PauliString:
    """Letter-wise product of two Pauli strings with exact phase tracking."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}"
        )
    out = []
    phase = 1 + 0j
    for ca, cb in zip(a.letters, b.letters):
        if ca == "I":
            out.append(cb)
        elif cb == "I":
            out.append(ca)
        elif ca == cb:
            out.append("I")
        else:
            letter, p = _CROSS[(ca, cb)]
            out.append(letter)
            phase *= p
    return PauliString(a.coeff * b.coeff * phase, "".join(out))


@dataclass(frozen=True)
class PauliSum:
    """Weighted sum of Pauli strings over a fixed qubit register."""

    n_qubits: int
    terms: tuple[PauliString, ...]

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        for t in self.terms:
            if t.n_qubits != self.n_qubits:
                raise ValueError(
                    f"term on {t.n_qubits} qubits in a {self.n_qubits}-qubit sum"
                )
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def from_terms(cls, n_qubits, term_list) -> "PauliSum":
        """Build from an iterable of (coeff, letters) pairs."""
        return cls(n_qubits, tuple(PauliString(c, s) for c, s in term_list))

    @classmethod
    def zero(cls, n_qubits) -> "PauliSum":
        return cls(n_qubits, ())

    @classmethod
    def identity(cls, n_qubits, coeff=1.0) -> "PauliSum":
        return cls(n_qubits, (PauliString(coeff, "I" * n_qubits),))

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        return PauliSum(self.n_qubits, self.terms + other.terms)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def __rmul__(self, scalar) -> "PauliSum":
        return PauliSum(
            self.n_qubits, tuple(t.scaled(scalar) for t in self.terms)
        )

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            if self.n_qubits != other.n_qubits:
                raise ValueError("qubit count mismatch")
            prods = [mul(a, b) for a in self.terms for b in other.terms]
            return PauliSum(self.n_qubits, tuple(prods))
        return (other) * self

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def coeff_of(self, letters: str) -> complex:
        return sum(
            (t.coeff for t in self.terms if t.letters == letters), 0 + 0j
        )

    def max_abs_coeff(self, skip_identity=False) -> float:
        vals = [
            abs(t.coeff)
            for t in self.terms
            if not (skip_identity and t.is_identity)
        ]
        return max(vals) if vals else 0.0

    def is_hermitian(self, tol=DROP_TOL) -> bool:
        return all(abs(t.coeff.imag) <= tol for t in simplify(self).terms)

    def to_matrix(self) -> np.ndarray:
        return to_matrix(self)

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self.n_qubits}, num_terms={self.num_terms})"


def simplify(h: PauliSum, drop_tol: float = DROP_TOL) -> PauliSum:
    """Merge duplicate letter arrays, drop tiny terms, sort canonically.

    Idempotent; output term order is lexicographic on the letter arrays.
    """
    acc: dict[str, complex] = {}
    for t in h.terms:
        acc[t.letters] = acc.get(t.letters, 0 + 0j) + t.coeff
    kept = [
        PauliString(c, s) for s, c in sorted(acc.items()) if abs(c) > drop_tol
    ]
    return PauliSum(h.n_qubits, tuple(kept))


def is_diagonal(h: PauliSum) -> bool:
    """True iff every term uses only I and Z letters."""
    return all(t.is_diagonal() for t in h.terms)


def _check_dense(n: int):
    if n > DENSE_QUBIT_LIMIT:
        raise ValueError(
            f"dense realization limited to {DENSE_QUBIT_LIMIT} qubits, got {n}"
        )


def to_matrix(h: PauliSum) -> np.ndarray:
    """Dense matrix of the sum; qubit 0 is the least significant bit."""
    _check_dense(h.n_qubits)
    dim = 2**h.n_qubits
    m = np.zeros((dim, dim), dtype=complex)
    for t in h.terms:
        m += t.to_matrix()
    return m


def zsign_vector(n: int, zmask: int) -> np.ndarray:
    """Vector of (-1)**popcount(k & zmask) over all basis indices k."""
    s = np.ones(1)
    for i in range(n):
        s = np.concatenate([s, -s] if (zmask >> i) & 1 else [s, s])
    return s


def diagonal_energies(h: PauliSum) -> np.ndarray:
    """Values <b|H|b> over all basis states of a diagonal sum."""
    if not is_diagonal(h):
        raise ValueError("Hamiltonian has non-diagonal terms")
    diag = np.zeros(2**h.n_qubits)
    for t in h.terms:
        if abs(t.coeff.imag) > DROP_TOL:
            raise ValueError("diagonal energies need real coefficients")
        _, zmask, _ = t.masks()
        diag += t.coeff.real * zsign_vector(h.n_qubits, zmask)
    return diag


def render(h: PauliSum) -> str:
    """Canonical text form, one `<re>,<im> <letters>` line per term."""
    lines = [f"{t.coeff.real!r},{t.coeff.imag!r} {t.letters}" for t in simplify(h).terms]
    return "\n".join(lines) + ("\n" if lines else "")


def parse(text: str, n_qubits: int | None = None) -> PauliSum:
    """Inverse of :func:`render`."""
    terms = []
    n = n_qubits
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            coeff_part, letters = line.split()
            re_s, im_s = coeff_part.split(",")
            coeff = complex(float(re_s), float(im_s))
        except ValueError as exc:
            raise ValueError(f"malformed Pauli term on line {lineno}: {raw!r}") from exc
        if n is None:
            n = len(letters)
        elif len(letters) != n:
            raise ValueError(f"inconsistent qubit count on line {lineno}")
        terms.append(PauliString(coeff, letters))
    if n is None:
        raise ValueError("cannot infer qubit count from an empty rendering")
    return PauliSum(n, tuple(terms))
