"""Pauli-string Hamiltonians, the transverse-field Ising presets, and time evolution."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import PAULI, hermitian_expi, kron_all

MAX_QUBITS = 10


@dataclass(frozen=True)
class PauliString:
    ops: str

    def __post_init__(self):
        ops = self.ops.upper()
        if not ops or set(ops) - set("IXYZ"):
            raise ValueError(f"invalid Pauli string {self.ops!r}")
        object.__setattr__(self, "ops", ops)

    @property
    def n(self) -> int:
        return len(self.ops)

    @property
    def support(self) -> tuple[int, ...]:
        """1-based indices of the qubits acted on non-trivially."""
        return tuple(i + 1 for i, p in enumerate(self.ops) if p != "I")

    def matrix(self) -> np.ndarray:
        return kron_all(PAULI[p] for p in self.ops)

    def __str__(self) -> str:
        return self.ops


class Hamiltonian:
    """Real-weighted sum of Pauli strings on ``n`` qubits.

    Duplicate strings are merged on construction; term order is otherwise
    kept as given.
    """

    def __init__(self, terms):
        merged: dict[PauliString, float] = {}
        for coeff, string in terms:
            if not isinstance(string, PauliString):
                string = PauliString(string)
            coeff = float(coeff)
            if not np.isfinite(coeff):
                raise ValueError("coefficients must be finite reals")
            merged[string] = merged.get(string, 0.0) + coeff
        if not merged:
            raise ValueError("a Hamiltonian needs at least one term")
        if not all(np.isfinite(c) for c in merged.values()):
            raise ValueError("merged coefficients overflow")
        sizes = {s.n for s in merged}
        if len(sizes) != 1:
            raise ValueError(f"Pauli strings have inconsistent lengths {sorted(sizes)}")
        self.n = sizes.pop()
        self.terms: tuple[tuple[float, PauliString], ...] = tuple(
            (c, s) for s, c in merged.items()
        )

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Hamiltonian) and self.terms == other.terms

    def __repr__(self) -> str:
        body = " + ".join(f"{c!r}*{s}" for c, s in self.terms)
        return f"Hamiltonian({body})"

    def to_matrix(self) -> np.ndarray:
        if self.n > MAX_QUBITS:
            raise ValueError(f"dense realization limited to {MAX_QUBITS} qubits")
        dim = 2**self.n
        out = np.zeros((dim, dim), dtype=complex)
        for c, s in self.terms:
            out += c * s.matrix()
        return out

    def time_evolution(self, tau: float) -> np.ndarray:
        """``exp(+i H tau)``."""
        return hermitian_expi(self.to_matrix(), tau)

    def lambda_norm(self) -> float:
        return float(sum(abs(c) for c, _ in self.terms))


def ising_hamiltonian(n: int, J, h) -> Hamiltonian:
    """Open-chain ``sum J_i X_i X_{i+1} + sum h_i Y_i``."""
    J, h = list(J), list(h)
    if n < 2:
        raise ValueError("the Ising chain needs at least two qubits")
    if len(J) != n - 1 or len(h) != n:
        raise ValueError(f"need {n - 1} couplings and {n} fields, got {len(J)} and {len(h)}")
    terms = []
    for i, j in enumerate(J):
        ops = ["I"] * n
        ops[i] = ops[i + 1] = "X"
        terms.append((j, "".join(ops)))
    for i, field in enumerate(h):
        ops = ["I"] * n
        ops[i] = "Y"
        terms.append((field, "".join(ops)))
    return Hamiltonian(terms)


ISING_COEFFICIENTS = {
    2: ([1.27], [1.54, 1.19]),
    3: ([1.81, 1.27], [1.54, 1.19, 0.53]),
    5: ([1.20, 1.40, 1.60, 1.80], [1.60, 1.30, 1.00, 0.70, 0.40]),
    8: (
        [1.20, 1.30, 1.40, 1.50, 1.60, 1.70, 1.80],
        [1.40, 1.10, 0.80, 1.00, 1.20, 1.50, 1.70, 1.30],
    ),
}

PRESETS = {f"ising{n}": n for n in ISING_COEFFICIENTS}


def preset(name: str) -> Hamiltonian:
    try:
        n = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    J, h = ISING_COEFFICIENTS[n]
    return ising_hamiltonian(n, J, h)


# text format: "<coefficient> <pauli-string>" per line, '#' comments


def format_hamiltonian(ham: Hamiltonian) -> str:
    return "".join(f"{c!r} {s}\n" for c, s in ham.terms)


def parse_hamiltonian(text: str) -> Hamiltonian:
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<coefficient> <pauli-string>'")
        try:
            coeff = float(parts[0])
        except ValueError:
            raise ValueError(f"line {lineno}: bad coefficient {parts[0]!r}") from None
        terms.append((coeff, PauliString(parts[1])))
    return Hamiltonian(terms)


def load_hamiltonian(path) -> Hamiltonian:
    return parse_hamiltonian(Path(path).read_text())


def save_hamiltonian(ham: Hamiltonian, path) -> None:
    Path(path).write_text(format_hamiltonian(ham))
