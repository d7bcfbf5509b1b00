"""Path distances from compiled sequences to the ideal time-evolution path."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .gates import CompiledSequence
from .hamiltonian import Hamiltonian
from .linalg import cost

DEFAULT_GRID_POINTS = 1001


def sequence_product(seq: CompiledSequence) -> np.ndarray:
    return seq.product()


def total_time(seq: CompiledSequence) -> float:
    return seq.total_time()


@dataclass
class PathProfile:
    method: str
    steps: np.ndarray  # 1..M
    cum_time: np.ndarray  # NaN where durations are undefined
    distance: np.ndarray
    final_cost: Optional[float] = None
    total_time: Optional[float] = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def mean(self) -> float:
        return float(np.mean(self.distance)) if len(self.distance) else math.nan

    @property
    def max(self) -> float:
        return float(np.max(self.distance)) if len(self.distance) else math.nan


class IdealPath:
    """Grid of ``exp(i H t)`` for ``t`` uniform on ``[0, tau]`` inclusive.

    Overlaps with the whole grid are evaluated in the eigenbasis of ``H``:
    ``Tr(exp(-iHt) V) = sum_k exp(-i e_k t) (W^dagger V W)_kk``.
    """

    def __init__(self, ham: Hamiltonian, tau: float, grid_points: int = DEFAULT_GRID_POINTS):
        if grid_points < 2:
            raise ValueError("grid_points must be >= 2")
        self.times = np.linspace(0.0, tau, grid_points)
        evals, self._evecs = np.linalg.eigh(ham.to_matrix())
        self._phases = np.exp(-1j * np.outer(self.times, evals))
        self.dim = 2**ham.n

    def distances(self, v: np.ndarray) -> np.ndarray:
        """Cost-form distance from ``v`` to every grid point."""
        w = self._evecs
        diag = np.sum(np.conj(w) * (v @ w), axis=0)
        return np.clip(1.0 - np.abs(self._phases @ diag) / self.dim, 0.0, 1.0)

    def distance(self, v: np.ndarray) -> float:
        return float(np.min(self.distances(v)))


def path_profile(
    seq: CompiledSequence,
    ham: Hamiltonian,
    tau: float,
    grid_points: int = DEFAULT_GRID_POINTS,
    method: str = "",
    target: Optional[np.ndarray] = None,
) -> PathProfile:
    """``d_m`` = minimum over the grid of ``1 - |Tr(exp(-iHt) P_m)| / 2^n``,
    with ``P_m`` the product of the first ``m`` gates.
    """
    if seq.n != ham.n:
        raise ValueError("sequence and Hamiltonian act on different qubit counts")
    path = IdealPath(ham, tau, grid_points)
    dist = np.array([path.distance(p) for p in seq.prefix_products()], dtype=float)
    durations = seq.durations()
    if all(d is not None for d in durations):
        cum = np.cumsum(np.array(durations, dtype=float))
        tot = seq.total_time()
    else:
        cum = np.full(len(seq), math.nan)
        tot = None
    if target is None:
        target = ham.time_evolution(tau)
    return PathProfile(
        method=method,
        steps=np.arange(1, len(seq) + 1),
        cum_time=cum,
        distance=dist,
        final_cost=cost(target, seq.product()),
        total_time=tot,
    )


@dataclass
class CompilationStats:
    method: str
    time: float
    mean_d: float  # NaN for an empty sequence
    max_d: float
    cost: float


def compilation_stats(
    seq: CompiledSequence,
    ham: Hamiltonian,
    tau: float,
    target: Optional[np.ndarray] = None,
    grid_points: int = DEFAULT_GRID_POINTS,
    method: str = "",
) -> CompilationStats:
    if target is None:
        target = ham.time_evolution(tau)
    time = seq.total_time()
    profile = path_profile(seq, ham, tau, grid_points, method, target)
    return CompilationStats(method, time, profile.mean, profile.max, profile.final_cost)
