"""Dense complex linear algebra used throughout the compiler.

Matrices are plain ``numpy`` complex arrays. Qubit 1 is the most-significant
tensor factor everywhere in the package.
"""
from __future__ import annotations

import numpy as np

TOL = 1e-9

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    """Tensor product with ``a`` as the more-significant factor."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def dagger(m) -> np.ndarray:
    return np.conj(np.transpose(m))


def is_unitary(m, tol: float = TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    err = dagger(m) @ m - np.eye(m.shape[0])
    return bool(np.max(np.abs(err), initial=0.0) <= tol)


def is_hermitian(m, tol: float = TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= tol)


def hermitian_expi(h, t: float) -> np.ndarray:
    """Return ``exp(+i h t)`` for Hermitian ``h`` via eigendecomposition.

    Note the sign: this is the ``e^{+iHt}`` convention used for the
    time-evolution targets, not the more common ``e^{-iHt}``.
    """
    h = as_matrix(h)
    if not is_hermitian(h):
        raise ValueError("hermitian_expi requires a Hermitian matrix")
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(1j * t * evals)) @ dagger(evecs)


def _check_dims(u: np.ndarray, v: np.ndarray) -> None:
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")


def hs_overlap(u, v) -> float:
    """``|Tr(v^dagger u)|``; equals ``dim`` when u and v agree up to phase."""
    u, v = as_matrix(u), as_matrix(v)
    _check_dims(u, v)
    # vdot conjugates its first argument and sums over flattened entries
    return float(abs(np.vdot(v, u)))


def cost(u, v) -> float:
    """Phase-invariant Hilbert-Schmidt cost ``1 - |Tr(v^dagger u)| / dim`` in [0, 1]."""
    u, v = as_matrix(u), as_matrix(v)
    _check_dims(u, v)
    dim = u.shape[0]
    if dim & (dim - 1):
        raise ValueError(f"dimension {dim} is not a power of two")
    return _clip_cost(1.0 - abs(np.vdot(v, u)) / dim)


def _clip_cost(c: float) -> float:
    return min(1.0, max(0.0, float(c)))


def trace_distance(u, v) -> float:
    """Half the sum of singular values of ``u - v``. Diagnostic only."""
    u, v = as_matrix(u), as_matrix(v)
    _check_dims(u, v)
    return 0.5 * float(np.sum(np.linalg.svd(u - v, compute_uv=False)))


def embed(gate, support, n: int) -> np.ndarray:
    """Lift a ``2^k``-dim gate acting on ``support`` (1-based) to ``n`` qubits."""
    gate = as_matrix(gate)
    support = tuple(support)
    k = len(support)
    if gate.shape[0] != 2**k:
        raise ValueError(f"gate of dim {gate.shape[0]} does not fit support {support}")
    if len(set(support)) != k or any(q < 1 or q > n for q in support):
        raise ValueError(f"invalid support {support} for {n} qubits")
    if support == tuple(range(support[0], support[0] + k)):
        left = 2 ** (support[0] - 1)
        right = 2 ** (n - support[-1])
        return np.kron(np.kron(np.eye(left), gate), np.eye(right))
    # general case: act on the chosen tensor axes of the identity
    dim = 2**n
    g = gate.reshape((2,) * (2 * k))
    eye = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    axes = [q - 1 for q in support]
    out = np.tensordot(g, eye, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output axes first; move them back into place
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(dim, dim)
