"""Product-formula baselines: randomized first-order Trotter and QDRIFT.

Both return :class:`~stoq.gates.CompiledSequence` values built from
``hamiltonian-term`` gates, so durations and path profiles work the same way
as for stochastic-search output.
"""
from __future__ import annotations

import numpy as np

from .gates import (
    HAMILTONIAN_TERM,
    CompiledSequence,
    GateAlphabet,
    GateInstance,
    GateSpec,
    ParamRange,
    term_alphabet,
    term_spec,
)
from .hamiltonian import Hamiltonian


def randomized_trotter(ham: Hamiltonian, tau: float, steps: int, rng: np.random.Generator) -> CompiledSequence:
    """``steps`` first-order Trotter slices, each in a fresh random term order."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if len(ham) == 0:
        raise ValueError("empty Hamiltonian")
    dt = tau / steps
    alphabet = term_alphabet(ham, abs(dt) if dt else 1.0)
    specs = alphabet.specs
    instances = []
    for _ in range(steps):
        for k in rng.permutation(len(specs)):
            spec = specs[k]
            instances.append(GateInstance(spec.id, spec.support, (dt,), abs(dt)))
    return CompiledSequence(alphabet, tuple(instances))


def qdrift_alphabet(ham: Hamiltonian, t_max: float) -> GateAlphabet:
    """Unit-strength Pauli exponentials ``exp(i P_k t)`` for each term."""
    specs = [term_spec(f"Q_{s}", 1.0, s, t_max) for _, s in ham.terms]
    return GateAlphabet(ham.n, specs)


def qdrift(ham: Hamiltonian, tau: float, reps: int, rng: np.random.Generator) -> CompiledSequence:
    """Sample ``reps`` terms with probability ``|c_k| / lambda``.

    Each sampled gate is ``exp(i sign(c_k) P_k lambda tau / reps)`` with
    ``lambda = sum |c_k|``; the coefficient sign is folded into the time.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    lam = ham.lambda_norm()
    if lam <= 0:
        raise ValueError("QDRIFT needs a nonzero Hamiltonian")
    dt = lam * tau / reps
    alphabet = qdrift_alphabet(ham, abs(dt))
    coeffs = np.array([c for c, _ in ham.terms])
    probs = np.abs(coeffs) / lam
    picks = rng.choice(len(coeffs), size=reps, p=probs)
    instances = []
    for k in picks:
        spec = alphabet.specs[k]
        t = float(np.sign(coeffs[k])) * dt
        instances.append(GateInstance(spec.id, spec.support, (t,), abs(t)))
    return CompiledSequence(alphabet, tuple(instances))


def ideal_sequence(ham: Hamiltonian, tau: float) -> CompiledSequence:
    """The single gate ``exp(i H tau)`` with duration ``tau``."""
    spec = GateSpec("ideal", HAMILTONIAN_TERM, tuple(range(1, ham.n + 1)),
                    (ParamRange(-abs(tau), abs(tau)),), generator=ham)
    alphabet = GateAlphabet(ham.n, [spec])
    return CompiledSequence(alphabet, (GateInstance("ideal", spec.support, (tau,), abs(tau)),))
