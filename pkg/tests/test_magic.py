import math

import numpy as np
import pytest

from hyperqaoa.ansatz import build_layout, evaluate
from hyperqaoa.errors import CapacityError
from hyperqaoa.hypergraph import generate_random, pubo_to_ising
from hyperqaoa.magic import (
    MagicRecord,
    fwht,
    normalize,
    pauli_spectrum,
    sre,
    stabilizer_renyi_entropy,
)
from hyperqaoa.statevector import QuantumState, apply_rx, plus_state

from oracles import pauli_expectations_naive
from test_hypergraph import four_qubit_hamiltonian

T_STATE = np.array([1.0, np.exp(1j * np.pi / 4)]) / np.sqrt(2)


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return QuantumState(n, v / np.linalg.norm(v))


def test_fwht_matches_hadamard_matrix():
    h = np.array([[1, 1], [1, -1]])
    full = h
    for _ in range(3):
        full = np.kron(full, h)
    v = np.random.default_rng(0).normal(size=16)
    assert np.allclose(fwht(v), full @ v)
    assert np.array_equal(v, np.random.default_rng(0).normal(size=16))  # input left untouched


def test_spectrum_of_zero_state():
    spec = pauli_spectrum(QuantumState.basis(1, 0)).squared_expectations
    # rows: X-mask, columns: Z-mask -> I, Z, X, Y
    assert np.allclose(spec, [[1, 1], [0, 0]])


def test_spectrum_of_plus_state():
    spec = pauli_spectrum(plus_state(1)).squared_expectations
    assert np.allclose(spec, [[1, 0], [1, 0]])


@pytest.mark.parametrize("n", range(1, 7))
def test_fast_spectrum_matches_naive(n):
    rng = np.random.default_rng(n)
    s = random_state(n, rng)
    fast = pauli_spectrum(s).squared_expectations
    naive = pauli_expectations_naive(s.amplitudes)
    for (a, b), value in naive.items():
        assert fast[a, b] == pytest.approx(value, abs=1e-9)


@pytest.mark.parametrize("n", [1, 4, 8, 12])
def test_stabilizer_states_have_zero_magic(n):
    assert abs(stabilizer_renyi_entropy(plus_state(n))) < 1e-9
    rng = np.random.default_rng(n)
    for x in rng.integers(0, 1 << n, size=3):
        assert abs(stabilizer_renyi_entropy(QuantumState.basis(n, int(x)))) < 1e-9


def test_t_state():
    assert stabilizer_renyi_entropy(QuantumState(1, T_STATE)) == pytest.approx(
        math.log2(4 / 3), abs=1e-9
    )


def test_additivity_under_tensor_product():
    rng = np.random.default_rng(2)
    a, b = random_state(2, rng), random_state(3, rng)
    joint = QuantumState(5, np.kron(b.amplitudes, a.amplitudes))
    total = stabilizer_renyi_entropy(a) + stabilizer_renyi_entropy(b)
    assert stabilizer_renyi_entropy(joint) == pytest.approx(total, abs=1e-9)
    t3 = QuantumState(3, np.kron(np.kron(T_STATE, T_STATE), T_STATE))
    assert stabilizer_renyi_entropy(t3) == pytest.approx(3 * math.log2(4 / 3), abs=1e-9)


@pytest.mark.parametrize("n", [3, 6, 10])
def test_purity_identity(n):
    ising = pubo_to_ising(generate_random(n, 3, range(-10, 11), rng_seed=n))
    layout = build_layout(ising, "ma", 2)
    rng = np.random.default_rng(n)
    s = evaluate(ising, layout, rng.uniform(-np.pi, np.pi, layout.total))
    assert pauli_spectrum(s).squared_expectations.sum() == pytest.approx(2 ** n, abs=1e-8)


def test_clifford_angles_give_zero_magic():
    h = four_qubit_hamiltonian()
    layout = build_layout(h, "sa", 3)
    clifford = evaluate(h, layout, np.full(layout.total, np.pi / 4))
    assert abs(stabilizer_renyi_entropy(clifford)) < 1e-9
    generic = evaluate(h, layout, np.full(layout.total, np.pi / 8))
    assert stabilizer_renyi_entropy(generic) > 1e-3


def test_non_negative_and_bounded():
    rng = np.random.default_rng(4)
    for n in range(1, 7):
        m = stabilizer_renyi_entropy(random_state(n, rng))
        assert -1e-12 <= m <= math.log2(2 ** n + 1) - 1 + 1e-12


def test_qubit_relabelling_invariance():
    rng = np.random.default_rng(6)
    n = 4
    s = random_state(n, rng)
    perm = [2, 0, 3, 1]
    idx = np.arange(1 << n)
    target = np.zeros_like(idx)
    for q, r in enumerate(perm):
        target |= ((idx >> q) & 1) << r
    moved = np.empty_like(s.amplitudes)
    moved[target] = s.amplitudes
    assert stabilizer_renyi_entropy(QuantumState(n, moved)) == pytest.approx(
        stabilizer_renyi_entropy(s), abs=1e-10
    )


def test_local_clifford_invariance():
    rng = np.random.default_rng(7)
    s = random_state(3, rng)
    before = stabilizer_renyi_entropy(s)
    apply_rx(s, 1, np.pi / 2)
    assert stabilizer_renyi_entropy(s) == pytest.approx(before, abs=1e-10)


def test_streamed_value_matches_spectrum():
    s = random_state(5, np.random.default_rng(9))
    for alpha in (0.5, 2.0, 3.0):
        via_spec = sre(pauli_spectrum(s), alpha).value
        assert stabilizer_renyi_entropy(s, alpha) == pytest.approx(via_spec, abs=1e-12)


def test_alpha_one_rejected():
    with pytest.raises(ValueError):
        stabilizer_renyi_entropy(plus_state(2), alpha=1)
    with pytest.raises(ValueError):
        sre(pauli_spectrum(plus_state(2)), alpha=1)


def test_capacity():
    with pytest.raises(CapacityError):
        stabilizer_renyi_entropy(plus_state(15))


def test_normalize_examples():
    recs, ok = normalize({"a": 0.0, "b": 0.5, "c": 0.25})
    assert ok
    assert [recs[k].normalized for k in "abc"] == [0.0, 1.0, 0.5]
    assert max(r.normalized for r in recs.values()) == 1.0
    recs, ok = normalize({"a": MagicRecord(2.0, 0.0), "b": MagicRecord(2.0, 0.0)})
    assert not ok
    assert all(r.normalized is None for r in recs.values())
    assert normalize({}) == ({}, False)
