"""Gate alphabets, sampled gate instances and compiled gate sequences.

Three kinds of gate spec are supported:

* ``fixed``: a constant unitary on its support, no parameters;
* ``parameterized``: a local matrix built from real parameters;
* ``hamiltonian-term``: ``exp(+i H_k t)`` for a generator ``H_k`` and a single
  time parameter ``t``. Only these gates carry a duration, ``|t|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .hamiltonian import Hamiltonian, PauliString
from .linalg import embed, hermitian_expi, is_unitary

FIXED = "fixed"
PARAMETERIZED = "parameterized"
HAMILTONIAN_TERM = "hamiltonian-term"

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ParamRange:
    lo: float
    hi: float
    closed: bool = True  # False means [lo, hi)

    def contains(self, x: float) -> bool:
        if self.closed:
            return self.lo <= x <= self.hi
        return self.lo <= x < self.hi


@dataclass(frozen=True, eq=False)
class GateSpec:
    id: str
    kind: str
    support: tuple[int, ...]
    param_ranges: tuple[ParamRange, ...] = ()
    # fixed: the local matrix; parameterized: params -> local matrix
    matrix: Optional[np.ndarray] = None
    builder: Optional[Callable[..., np.ndarray]] = None
    # hamiltonian-term: generator acting on all n qubits
    generator: Optional[Hamiltonian] = None

    def __post_init__(self):
        if self.kind not in (FIXED, PARAMETERIZED, HAMILTONIAN_TERM):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.support)) != len(self.support):
            raise ValueError(f"repeated qubit in support {self.support}")
        if self.kind == FIXED and (self.param_ranges or self.matrix is None):
            raise ValueError("fixed gates take a matrix and no parameters")
        if self.kind == PARAMETERIZED and self.builder is None:
            raise ValueError("parameterized gates need a builder")
        if self.kind == HAMILTONIAN_TERM and (len(self.param_ranges) != 1 or self.generator is None):
            raise ValueError("hamiltonian-term gates need a generator and one time parameter")

    @property
    def has_duration(self) -> bool:
        return self.kind == HAMILTONIAN_TERM


@dataclass(frozen=True)
class GateInstance:
    spec_id: str
    support: tuple[int, ...]
    params: tuple[float, ...] = ()
    duration: Optional[float] = None


class GateAlphabet:
    """Immutable collection of gate specs on ``n`` qubits."""

    def __init__(self, n: int, specs: Sequence[GateSpec]):
        specs = tuple(specs)
        if not specs:
            raise ValueError("a gate alphabet needs at least one gate")
        ids = [s.id for s in specs]
        if len(set(ids)) != len(ids):
            raise ValueError("gate ids must be unique")
        for s in specs:
            if any(q < 1 or q > n for q in s.support):
                raise ValueError(f"gate {s.id} has support {s.support} outside 1..{n}")
            if s.generator is not None and s.generator.n != n:
                raise ValueError(f"gate {s.id} generator is on {s.generator.n} qubits, not {n}")
        self.n = n
        self.specs = specs
        self._by_id = {s.id: s for s in specs}
        self._realizers = {}
        self._appliers = {}
        for s in specs:
            self._realizers[s.id], self._appliers[s.id] = _realizer(s, n)

    def __len__(self) -> int:
        return len(self.specs)

    def __getitem__(self, spec_id: str) -> GateSpec:
        try:
            return self._by_id[spec_id]
        except KeyError:
            raise KeyError(f"unknown gate id {spec_id!r}") from None

    def __contains__(self, spec_id: str) -> bool:
        return spec_id in self._by_id

    def make(self, spec_id: str, *params: float) -> GateInstance:
        """Build a validated instance of ``spec_id`` with explicit parameters."""
        spec = self[spec_id]
        params = tuple(float(p) for p in params)
        inst = GateInstance(spec.id, spec.support, params, _duration(spec, params))
        self.validate(inst)
        return inst

    def validate(self, inst: GateInstance) -> GateSpec:
        spec = self[inst.spec_id]
        if tuple(inst.support) != spec.support:
            raise ValueError(f"{inst.spec_id}: support {inst.support} != {spec.support}")
        if len(inst.params) != len(spec.param_ranges):
            raise ValueError(f"{inst.spec_id}: expected {len(spec.param_ranges)} parameters")
        for p, r in zip(inst.params, spec.param_ranges):
            if not r.contains(p):
                raise ValueError(f"{inst.spec_id}: parameter {p} outside range {r}")
        return spec

    def matrix(self, inst: GateInstance) -> np.ndarray:
        """Dense ``2^n`` unitary for an instance, without range validation."""
        return self._realizers[inst.spec_id](inst.params)

    def apply(self, inst: GateInstance, m: np.ndarray) -> np.ndarray:
        """``matrix(inst) @ m``, using the cheapest available route."""
        return self._appliers[inst.spec_id](inst.params, m)


def _duration(spec: GateSpec, params) -> Optional[float]:
    return abs(params[0]) if spec.has_duration else None


def _pauli_rotation(string: PauliString, scale: float):
    """Builders for ``exp(i scale x P) = cos(scale x) I + i sin(scale x) P``.

    ``P`` has one nonzero per row, so ``P @ M`` is a phased row permutation.
    """
    pauli = string.matrix()
    dim = pauli.shape[0]
    eye = np.eye(dim, dtype=complex)
    rows = np.arange(dim)
    cols = np.argmax(np.abs(pauli), axis=1)
    phase = pauli[rows, cols][:, None]

    def matrix(params):
        a = scale * params[0]
        return math.cos(a) * eye + (1j * math.sin(a)) * pauli

    def apply(params, m):
        a = scale * params[0]
        return math.cos(a) * m + (1j * math.sin(a)) * (phase * m[cols])

    return matrix, apply


def _local_apply(builder, support, n):
    """``G @ M`` for a gate on a contiguous block of qubits, without embedding."""
    lead = 2 ** (support[0] - 1)
    k = 2 ** len(support)

    def apply(params, m):
        dim = m.shape[0]
        blocks = m.reshape(lead, k, -1)
        return (builder(*params) @ blocks).reshape(dim, -1)

    return apply


def _realizer(spec: GateSpec, n: int):
    """Return ``(matrix(params), apply(params, M))`` for a spec on ``n`` qubits."""
    if spec.kind == FIXED:
        full = embed(spec.matrix, spec.support, n)
        return (lambda params: full), (lambda params, m: full @ m)
    if spec.kind == PARAMETERIZED:
        def matrix(params):
            return embed(spec.builder(*params), spec.support, n)

        sup = spec.support
        if sup == tuple(range(sup[0], sup[0] + len(sup))):
            return matrix, _local_apply(spec.builder, sup, n)
        return matrix, (lambda params, m: matrix(params) @ m)
    gen = spec.generator
    if len(gen) == 1:
        c, string = gen.terms[0]
        return _pauli_rotation(string, c)
    hmat = gen.to_matrix()

    def matrix(params):
        return hermitian_expi(hmat, params[0])

    return matrix, (lambda params, m: matrix(params) @ m)


def instance_matrix(inst: GateInstance, alphabet: GateAlphabet, n: Optional[int] = None) -> np.ndarray:
    if n is not None and n != alphabet.n:
        raise ValueError(f"alphabet is for {alphabet.n} qubits, not {n}")
    alphabet.validate(inst)
    return alphabet.matrix(inst)


def sample_instance(alphabet: GateAlphabet, rng: np.random.Generator) -> GateInstance:
    """Uniform choice of gate, then uniform draw of each parameter over its range."""
    spec = alphabet.specs[int(rng.integers(len(alphabet.specs)))]
    params = tuple(float(rng.uniform(r.lo, r.hi)) for r in spec.param_ranges)
    return GateInstance(spec.id, spec.support, params, _duration(spec, params))


# -- concrete alphabets -------------------------------------------------------


def term_spec(spec_id: str, coeff: float, string: PauliString, t_max: float) -> GateSpec:
    return GateSpec(
        id=spec_id,
        kind=HAMILTONIAN_TERM,
        support=string.support,
        param_ranges=(ParamRange(-t_max, t_max),),
        generator=Hamiltonian([(coeff, string)]),
    )


def term_alphabet(ham: Hamiltonian, t_max: float, prefix: str = "H") -> GateAlphabet:
    """One ``exp(i H_k t)`` gate per term, ``|t| <= t_max``."""
    if len(ham) == 0:
        raise ValueError("empty Hamiltonian")
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    specs = [term_spec(f"{prefix}_{s}", c, s, t_max) for c, s in ham.terms]
    return GateAlphabet(ham.n, specs)


def hamiltonian_term_alphabet(ham: Hamiltonian, epsilon: float = 0.2, tau: float = 0.5) -> GateAlphabet:
    """Per-term gates whose time is limited to ``[-epsilon*tau, epsilon*tau]``."""
    if epsilon <= 0 or tau <= 0:
        raise ValueError("epsilon and tau must be positive")
    return term_alphabet(ham, epsilon * tau)


def r_gate(theta: float, phi: float) -> np.ndarray:
    """Single-qubit rotation by ``theta`` about the equatorial axis at angle ``phi``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -1j * np.exp(-1j * phi) * s],
            [-1j * np.exp(1j * phi) * s, c],
        ],
        dtype=complex,
    )


def xx_gate(theta: float) -> np.ndarray:
    c, s = math.cos(theta), -1j * math.sin(theta)
    return np.array(
        [
            [c, 0, 0, s],
            [0, c, s, 0],
            [0, s, c, 0],
            [s, 0, 0, c],
        ],
        dtype=complex,
    )


def universal_alphabet(n: int) -> GateAlphabet:
    """``R_phi(theta)`` on every qubit and ``XX(theta)`` on every unordered pair."""
    if n < 1:
        raise ValueError("need at least one qubit")
    angle = ParamRange(0.0, TWO_PI, closed=False)
    specs = [
        GateSpec(f"R{q}", PARAMETERIZED, (q,), (angle, angle), builder=r_gate)
        for q in range(1, n + 1)
    ]
    specs += [
        GateSpec(f"XX{i}_{j}", PARAMETERIZED, (i, j), (angle,), builder=xx_gate)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
    ]
    alphabet = GateAlphabet(n, specs)
    # XX(theta) = exp(-i theta X_i X_j) on any pair, adjacent or not
    for spec in specs[n:]:
        ops = ["I"] * n
        for q in spec.support:
            ops[q - 1] = "X"
        pair = _pauli_rotation(PauliString("".join(ops)), -1.0)
        alphabet._realizers[spec.id], alphabet._appliers[spec.id] = pair
    return alphabet


# -- sequences ----------------------------------------------------------------


@dataclass(frozen=True)
class CompiledSequence:
    """Ordered gates ``G_1 .. G_M``; the realized unitary is ``G_M ... G_1``."""

    alphabet: GateAlphabet
    instances: tuple[GateInstance, ...] = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return self.alphabet.n

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    def append(self, inst: GateInstance) -> "CompiledSequence":
        return CompiledSequence(self.alphabet, self.instances + (inst,))

    def insert(self, index: int, inst: GateInstance) -> "CompiledSequence":
        """Copy with ``inst`` placed at 0-based ``index`` (``len`` appends)."""
        if not 0 <= index <= len(self.instances):
            raise IndexError(f"cannot insert at index {index}")
        return CompiledSequence(self.alphabet, self.instances[:index] + (inst,) + self.instances[index:])

    def remove(self, index: int) -> "CompiledSequence":
        """Copy without the gate at 0-based ``index``."""
        if not 0 <= index < len(self.instances):
            raise IndexError(f"no gate at index {index}")
        return CompiledSequence(self.alphabet, self.instances[:index] + self.instances[index + 1 :])

    def pop(self) -> "CompiledSequence":
        return self.remove(len(self.instances) - 1)

    def prefix_products(self):
        """Yield ``G_m ... G_1`` for m = 1..M."""
        prod = np.eye(2**self.n, dtype=complex)
        for inst in self.instances:
            prod = self.alphabet.apply(inst, prod)
            yield prod

    def product(self) -> np.ndarray:
        prod = np.eye(2**self.n, dtype=complex)
        for prod in self.prefix_products():
            pass
        return prod

    def durations(self) -> list[Optional[float]]:
        return [inst.duration for inst in self.instances]

    def total_time(self) -> float:
        durations = self.durations()
        if any(d is None for d in durations):
            raise ValueError("sequence contains gates without a defined duration")
        return float(math.fsum(durations))

    def is_unitary(self, tol: float = 1e-8) -> bool:
        return is_unitary(self.product(), tol)


# text format: "<spec_id> q=<i[,j]> p=<v1[,v2]>" per line, '#' comments

PARAM_DECIMALS = 12


def format_sequence(seq: CompiledSequence) -> str:
    lines = []
    for inst in seq.instances:
        line = f"{inst.spec_id} q={','.join(str(q) for q in inst.support)}"
        if inst.params:
            line += " p=" + ",".join(f"{p:.{PARAM_DECIMALS}f}" for p in inst.params)
        lines.append(line + "\n")
    return "".join(lines)


def parse_sequence(text: str, alphabet: GateAlphabet) -> CompiledSequence:
    instances = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        spec_id, *fields = line.split()
        support: tuple[int, ...] = ()
        params: tuple[float, ...] = ()
        try:
            for f in fields:
                key, _, value = f.partition("=")
                if key == "q":
                    support = tuple(int(v) for v in value.split(","))
                elif key == "p":
                    params = tuple(float(v) for v in value.split(",")) if value else ()
                else:
                    raise ValueError(f"unknown field {key!r}")
            spec = alphabet[spec_id]
            inst = GateInstance(spec_id, support, params, _duration(spec, params))
            alphabet.validate(inst)
        except (KeyError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        instances.append(inst)
    return CompiledSequence(alphabet, tuple(instances))


def load_sequence(path, alphabet: GateAlphabet) -> CompiledSequence:
    return parse_sequence(Path(path).read_text(), alphabet)


def save_sequence(seq: CompiledSequence, path) -> None:
    Path(path).write_text(format_sequence(seq))
