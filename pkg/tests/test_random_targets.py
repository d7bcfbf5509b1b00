import math

import numpy as np
import pytest
from scipy import stats

from stoq.gates import universal_alphabet
from stoq.linalg import cost, is_unitary
from stoq.random_targets import (
    format_matrix,
    haar_random_unitary,
    load_matrix,
    parse_matrix,
    random_circuit,
    save_matrix,
)
from oracles import random_unitary


def test_dim1_phase_uniform():
    r = np.random.default_rng(1)
    angles = np.array([np.angle(haar_random_unitary(1, r)[0, 0]) % (2 * math.pi) for _ in range(10_000)])
    assert stats.kstest(angles, stats.uniform(0, 2 * math.pi).cdf).pvalue > 0.01


def test_unitary_dim32(rng):
    for _ in range(5):
        assert is_unitary(haar_random_unitary(32, rng), 1e-9)


def test_trace_moment():
    r = np.random.default_rng(2)
    vals = np.array([abs(np.trace(haar_random_unitary(4, r))) ** 2 for _ in range(2000)])
    assert abs(vals.mean() - 1) <= 3 * vals.std(ddof=1) / math.sqrt(len(vals))


def test_seeded_determinism():
    a = haar_random_unitary(8, np.random.default_rng(5))
    b = haar_random_unitary(8, np.random.default_rng(5))
    c = haar_random_unitary(8, np.random.default_rng(6))
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


def test_left_invariance():
    r = np.random.default_rng(3)
    w = random_unitary(4, r)
    plain = [cost(haar_random_unitary(4, r), np.eye(4)) for _ in range(500)]
    rotated = [cost(w @ haar_random_unitary(4, r), np.eye(4)) for _ in range(500)]
    assert stats.ks_2samp(plain, rotated).pvalue > 0.01


def test_rejects_bad_dim(rng):
    with pytest.raises(ValueError):
        haar_random_unitary(0, rng)


@pytest.mark.parametrize("depth, gates", [(1, 5), (40, 200), (0.5, 2), (0.7, 4)])
def test_circuit_gate_counts(depth, gates, rng):
    assert len(random_circuit(5, depth, universal_alphabet(5), rng)) == gates


def test_circuit_single_gate_product():
    alpha = universal_alphabet(2)
    circ = random_circuit(2, 0.5, alpha, np.random.default_rng(4))
    assert len(circ) == 1
    np.testing.assert_allclose(circ.product(), alpha.matrix(circ.instances[0]), atol=1e-15)


def test_circuit_errors(rng):
    with pytest.raises(ValueError):
        random_circuit(5, 0.05, universal_alphabet(5), rng)
    with pytest.raises(ValueError):
        random_circuit(4, 1, universal_alphabet(5), rng)


def test_deep_circuits_unitary(rng):
    alpha = universal_alphabet(5)
    for _ in range(100):
        assert random_circuit(5, 40, alpha, rng).is_unitary(1e-8)


def test_matrix_text_round_trip(rng, tmp_path):
    m = haar_random_unitary(8, rng)
    text = format_matrix(m)
    assert text.splitlines()[0] == "8"
    assert len(text.splitlines()) == 65
    assert np.array_equal(parse_matrix(text), m)
    save_matrix(m, tmp_path / "u.txt")
    assert np.array_equal(load_matrix(tmp_path / "u.txt"), m)


@pytest.mark.parametrize("text", ["", "2\n1,0\n0,0\n0,0\n", "1\n1;0\n"])
def test_matrix_parse_rejects(text):
    with pytest.raises(ValueError):
        parse_matrix(text)
