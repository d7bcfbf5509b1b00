"""Haar-random unitaries and random circuits used as compilation targets."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .gates import CompiledSequence, GateAlphabet, sample_instance


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``dim x dim`` unitary.

    QR of a complex Ginibre matrix, with the phases of ``diag(R)`` folded
    back into ``Q`` so the result is not biased by the QR sign convention.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_circuit(n: int, avg_depth: float, alphabet: GateAlphabet, rng: np.random.Generator) -> CompiledSequence:
    """``round(avg_depth * n)`` gates drawn independently from ``alphabet``.

    Python's ``round`` is half-to-even, so e.g. 2.5 gates rounds to 2.
    """
    if alphabet.n != n:
        raise ValueError(f"alphabet is for {alphabet.n} qubits, not {n}")
    count = round(avg_depth * n)
    if count < 1:
        raise ValueError("avg_depth * n must round to at least one gate")
    return CompiledSequence(alphabet, tuple(sample_instance(alphabet, rng) for _ in range(count)))


# plain-text dense matrix: "dim" header, then one "re,im" pair per line, row-major


def format_matrix(m) -> str:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    lines = [f"{m.shape[0]}\n"]
    lines += [f"{z.real:.17g},{z.imag:.17g}\n" for z in m.ravel()]
    return "".join(lines)


def parse_matrix(text: str) -> np.ndarray:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError("empty matrix file")
    dim = int(rows[0])
    entries = rows[1:]
    if len(entries) != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, found {len(entries)}")
    vals = np.empty(dim * dim, dtype=complex)
    for k, entry in enumerate(entries):
        re, im = entry.split(",")
        vals[k] = complex(float(re), float(im))
    return vals.reshape(dim, dim)


def save_matrix(m, path) -> None:
    Path(path).write_text(format_matrix(m))


def load_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())
