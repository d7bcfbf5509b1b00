"""Annealed Markov-chain search over gate sequences.

The chain starts from the empty sequence (identity). Each iteration raises
the inverse temperature ``beta`` by a fixed step, proposes adding a freshly
sampled gate or removing an existing one, and accepts with probability
``exp(-beta * delta)`` for cost increases ``delta > 0`` (always otherwise).

Where gates are added and removed is configurable: at the end of the
sequence only (a stack), or at uniformly random positions.

Prefix products are cached, so pricing a proposal takes at most a couple of
matrix products; an accepted interior edit rebuilds the prefixes after it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .gates import CompiledSequence, GateAlphabet, GateInstance, sample_instance
from .linalg import TOL, _clip_cost, dagger, is_unitary

APPEND = "append"
REMOVE = "remove"

END = "end"
RANDOM = "random"
LAST = "last"


@dataclass(frozen=True)
class StoqConfig:
    num_iterations: int = 10_000
    delta_beta: float = 0.01
    p_append: float = 0.5
    cost_threshold: Optional[float] = None
    seed: int = 0
    insertion: str = END  # where an added gate goes: "end" or "random"
    removal: str = LAST  # which gate a removal drops: "last" or "random"

    def __post_init__(self):
        if int(self.num_iterations) != self.num_iterations or self.num_iterations < 1:
            raise ValueError("num_iterations must be a positive integer")
        if not self.delta_beta > 0:
            raise ValueError("delta_beta must be positive")
        if not 0 < self.p_append < 1:
            raise ValueError("p_append must lie strictly between 0 and 1")
        if self.cost_threshold is not None and not 0 <= self.cost_threshold <= 1:
            raise ValueError("cost_threshold must lie in [0, 1]")
        if self.insertion not in (END, RANDOM):
            raise ValueError(f"insertion must be {END!r} or {RANDOM!r}")
        if self.removal not in (LAST, RANDOM):
            raise ValueError(f"removal must be {LAST!r} or {RANDOM!r}")


@dataclass
class CompilationTrace:
    """Per-iteration record of a run. Arrays are indexed by iteration - 1."""

    beta: np.ndarray
    cost: np.ndarray
    appended: np.ndarray  # True for add proposals, False for removals
    accepted: np.ndarray
    length: np.ndarray
    sequence: CompiledSequence
    final_cost: float
    product: np.ndarray  # cached running product of the final sequence

    def __len__(self) -> int:
        return len(self.cost)

    @property
    def iterations(self) -> np.ndarray:
        return np.arange(1, len(self.cost) + 1)

    @property
    def kinds(self) -> list[str]:
        return [APPEND if a else REMOVE for a in self.appended]


def accept_probability(cost: float, new_cost: float, beta: float) -> float:
    delta = new_cost - cost
    if delta <= 0:
        return 1.0
    return math.exp(-beta * delta)


def propose(
    length: int,
    alphabet: GateAlphabet,
    p_append: float,
    rng: np.random.Generator,
    insertion: str = END,
    removal: str = LAST,
):
    """Draw one move: ``(APPEND, (index, instance))`` or ``(REMOVE, index)``.

    Indices are 0-based positions in the gate list (``G_1`` is index 0). An
    empty sequence always adds, without consuming a coin flip.
    """
    if length == 0 or rng.random() < p_append:
        inst = sample_instance(alphabet, rng)
        where = length if insertion == END else int(rng.integers(length + 1))
        return APPEND, (where, inst)
    if removal == LAST:
        return REMOVE, length - 1
    return REMOVE, int(rng.integers(length))


def random_change(
    seq: CompiledSequence,
    alphabet: GateAlphabet,
    p_append: float,
    rng: np.random.Generator,
    insertion: str = END,
    removal: str = LAST,
) -> CompiledSequence:
    """Return a new sequence with one gate added or one gate removed."""
    kind, arg = propose(len(seq), alphabet, p_append, rng, insertion, removal)
    if kind == APPEND:
        where, inst = arg
        return seq.insert(where, inst)
    return seq.remove(arg)


class _Chain:
    """Gate list plus cached prefix products ``P_0 = I, P_1, .., P_M``."""

    def __init__(self, target: np.ndarray, alphabet: GateAlphabet):
        self.alphabet = alphabet
        self.dim = target.shape[0]
        self.target = target
        self.target_dag = dagger(target)
        self.instances: list[GateInstance] = []
        self.prefix = [np.eye(self.dim, dtype=complex)]
        self.cost = self._cost(self.prefix[0])
        # U^dagger P_M for pricing interior edits; rebuilt lazily
        self._tp: Optional[np.ndarray] = None

    def _cost(self, prod: np.ndarray) -> float:
        # vdot(U, V) = Tr(U^dagger V)
        return _clip_cost(1.0 - abs(np.vdot(self.target, prod)) / self.dim)

    def _target_prod(self) -> np.ndarray:
        if self._tp is None:
            self._tp = self.target_dag @ self.prefix[-1]
        return self._tp

    def price_insert(self, where: int, inst: GateInstance):
        """Cost after inserting at ``where``; also the new product when appending."""
        if where == len(self.instances):
            prod = self.alphabet.apply(inst, self.prefix[-1])
            return self._cost(prod), prod
        # P' = P_M P_k^dagger G P_k, so Tr(U^dagger P') = Tr(G C) with
        # C = P_k (U^dagger P_M) P_k^dagger
        pk = self.prefix[where]
        c = pk @ self._target_prod() @ dagger(pk)
        tr = np.trace(self.alphabet.apply(inst, c))
        return _clip_cost(1.0 - abs(tr) / self.dim), None

    def price_remove(self, j: int) -> float:
        if j == len(self.instances) - 1:
            return self._cost(self.prefix[j])
        # P' = P_M P_{j+1}^dagger P_j, so
        # Tr(U^dagger P') = Tr(P_j (U^dagger P_M) P_{j+1}^dagger)
        tr = np.vdot(self.prefix[j + 1], self.prefix[j] @ self._target_prod())
        return _clip_cost(1.0 - abs(tr) / self.dim)

    def do_insert(self, where: int, inst: GateInstance, prod, new_cost: float) -> None:
        if prod is not None:
            self.instances.append(inst)
            self.prefix.append(prod)
            self.cost = new_cost
        else:
            self.instances.insert(where, inst)
            self._rebuild(where)
        self._tp = None

    def do_remove(self, j: int) -> None:
        del self.instances[j]
        self._rebuild(j)
        self._tp = None

    def _rebuild(self, start: int) -> None:
        del self.prefix[start + 1 :]
        apply = self.alphabet.apply
        for inst in self.instances[start:]:
            self.prefix.append(apply(inst, self.prefix[-1]))
        self.cost = self._cost(self.prefix[-1])


def compile(
    target,
    alphabet: GateAlphabet,
    config: StoqConfig = StoqConfig(),
    *,
    rng: Optional[np.random.Generator] = None,
    beta_schedule: Optional[Callable[[int], float]] = None,
) -> tuple[CompiledSequence, CompilationTrace]:
    """Search for a gate sequence whose product approximates ``target``.

    ``rng`` overrides the generator seeded from ``config.seed``.
    ``beta_schedule`` maps the 1-based iteration to beta and replaces the
    linear schedule; it exists for testing limiting cases.
    """
    target = np.asarray(target, dtype=complex)
    dim = 2**alphabet.n
    if target.shape != (dim, dim):
        raise ValueError(f"target shape {target.shape} does not match {alphabet.n} qubits")
    if not is_unitary(target, TOL):
        raise ValueError("target is not unitary")
    if rng is None:
        rng = np.random.default_rng(config.seed)

    n_iter = int(config.num_iterations)
    threshold = config.cost_threshold
    chain = _Chain(target, alphabet)

    betas = np.empty(n_iter)
    cost_log = np.empty(n_iter)
    appended = np.zeros(n_iter, dtype=bool)
    accepted = np.zeros(n_iter, dtype=bool)
    lengths = np.empty(n_iter, dtype=np.int64)

    done = n_iter
    for i in range(1, n_iter + 1):
        beta = beta_schedule(i) if beta_schedule is not None else i * config.delta_beta
        kind, arg = propose(
            len(chain.instances), alphabet, config.p_append, rng, config.insertion, config.removal
        )
        if kind == APPEND:
            new_cost, prod = chain.price_insert(*arg)
        else:
            new_cost = chain.price_remove(arg)
        delta = new_cost - chain.cost
        ok = delta <= 0 or rng.random() < math.exp(-beta * delta)
        if ok:
            if kind == APPEND:
                chain.do_insert(*arg, prod, new_cost)
            else:
                chain.do_remove(arg)

        k = i - 1
        betas[k] = beta
        cost_log[k] = chain.cost
        appended[k] = kind == APPEND
        accepted[k] = ok
        lengths[k] = len(chain.instances)
        if threshold is not None and chain.cost <= threshold:
            done = i
            break

    seq = CompiledSequence(alphabet, tuple(chain.instances))
    trace = CompilationTrace(
        beta=betas[:done],
        cost=cost_log[:done],
        appended=appended[:done],
        accepted=accepted[:done],
        length=lengths[:done],
        sequence=seq,
        final_cost=chain.cost,
        product=chain.prefix[-1],
    )
    return seq, trace
