"""Independent reference implementations used only by the tests.

None of these share code with the package: they use explicit loops, series
expansions or scipy routines instead of the package's numerics.
"""
import itertools
import math

import numpy as np
import scipy.linalg

SIGMA = {
    "I": [[1, 0], [0, 1]],
    "X": [[0, 1], [1, 0]],
    "Y": [[0, -1j], [1j, 0]],
    "Z": [[1, 0], [0, -1]],
}


def random_hermitian(dim, rng):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def random_unitary(dim, rng):
    """Unitary from expm of a random anti-Hermitian matrix (not Haar)."""
    return scipy.linalg.expm(1j * random_hermitian(dim, rng))


def taylor_expi(h, t, terms=40):
    """sum_k (i h t)^k / k! for k < terms."""
    a = 1j * t * np.asarray(h, dtype=complex)
    out = np.zeros_like(a)
    power = np.eye(a.shape[0], dtype=complex)
    for k in range(terms):
        out = out + power / math.factorial(k)
        power = power @ a
    return out


def kron_loop(a, b):
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i, j, k, l in itertools.product(range(ra), range(ca), range(rb), range(cb)):
        out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def pauli_loop(ops):
    out = np.array([[1.0 + 0j]])
    for p in ops:
        out = kron_loop(out, SIGMA[p])
    return out


def hamiltonian_loop(terms):
    """Sum of coeff * Pauli string, each built by explicit kron loops."""
    mats = [c * pauli_loop(s) for c, s in terms]
    return sum(mats[1:], mats[0])


def overlap_entrywise(u, v):
    u, v = np.asarray(u), np.asarray(v)
    total = 0j
    for i in range(u.shape[0]):
        for j in range(u.shape[1]):
            total += np.conj(v[i, j]) * u[i, j]
    return abs(total)


def trace_distance_eig(u, v):
    d = np.asarray(u) - np.asarray(v)
    ev = np.linalg.eigvalsh(d.conj().T @ d)
    return 0.5 * float(np.sum(np.sqrt(np.clip(ev, 0, None))))


def cost_direct(u, v):
    dim = u.shape[0]
    return 1.0 - abs(np.trace(np.conj(v).T @ u)) / dim


def path_distance_brute(hmat, tau, grid_points, v):
    """min over t on the grid of 1 - |Tr(expm(iHt)^dagger V)| / dim, via scipy expm."""
    best = math.inf
    for t in np.linspace(0.0, tau, grid_points):
        best = min(best, cost_direct(v, scipy.linalg.expm(1j * t * hmat)))
    return best
