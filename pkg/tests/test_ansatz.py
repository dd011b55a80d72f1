import itertools

import numpy as np
import pytest

from hyperqaoa.ansatz import (
    Ansatz,
    InitKind,
    InitStrategy,
    Scheme,
    SchemeKind,
    broadcast,
    build_layout,
    evaluate,
    initialize,
)
from hyperqaoa.errors import CapacityError
from hyperqaoa.hypergraph import (
    IsingProblem,
    PuboProblem,
    generate_cyclic,
    generate_random,
    pubo_to_ising,
)
from hyperqaoa.statevector import plus_state
from hyperqaoa.symmetry import automorphism_generators, find_orbits, is_automorphism

from oracles import qaoa_circuit_state
from test_hypergraph import four_qubit_hamiltonian

SCHEMES = ["sa", "ma", "ka", "aa"]


def oracle_state(problem, layout, params):
    terms = [(t.coefficient, t.vertices) for t in problem.terms]
    layers = []
    for l in range(layout.p):
        gammas = [params[s] for s in layout.gamma_slots[l]]
        betas = [params[s] for s in layout.beta_slots[l]]
        layers.append((gammas, betas))
    return qaoa_circuit_state(problem.n, terms, layers)


@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_ma_parameter_count_cyclic(n):
    ising = pubo_to_ising(generate_cyclic(n, 3))
    layout = build_layout(ising, "ma", 1)
    if n == 4:
        assert layout.total == 14  # two pair terms merge at n=4
    else:
        assert layout.total == 4 * n


def test_ka_layout_four_qubit_example():
    layout = build_layout(four_qubit_hamiltonian(), "ka", 1)
    assert layout.total == 7
    h = four_qubit_hamiltonian()
    orders = [[h.terms[t].order for t in grp] for grp in layout.term_groups]
    assert [set(o) for o in orders] == [{1}, {2}, {3}]
    assert layout.qubit_groups == ((0,), (1,), (2,), (3,))


@pytest.mark.parametrize("p", [1, 2, 3])
def test_sa_layout_has_two_slots_per_layer(p):
    layout = build_layout(pubo_to_ising(generate_cyclic(6, 3)), "sa", p)
    assert layout.total == 2 * p


def test_layout_slot_invariants():
    ising = pubo_to_ising(generate_random(7, 3, [-1, 1], rng_seed=2))
    for scheme in SCHEMES:
        layout = build_layout(ising, scheme, 3)
        for l in range(3):
            assert len(layout.gamma_slots[l]) == len(ising.terms)
            assert len(layout.beta_slots[l]) == ising.n
            used = set(layout.gamma_slots[l]) | set(layout.beta_slots[l])
            assert used == set(range(l * layout.per_layer, (l + 1) * layout.per_layer))


def test_aa_rejects_bad_orbits():
    ising = pubo_to_ising(generate_cyclic(5, 3))
    bad = Scheme(SchemeKind.AA, term_orbits=((0,),), vertex_orbits=((0, 1, 2, 3, 4),))
    with pytest.raises(ValueError):
        build_layout(ising, bad, 1)


def test_evaluate_zero_params_is_plus_state():
    ising = pubo_to_ising(generate_cyclic(5, 3))
    for scheme in SCHEMES:
        layout = build_layout(ising, scheme, 2)
        state = evaluate(ising, layout, np.zeros(layout.total))
        assert np.array_equal(state.amplitudes, plus_state(5).amplitudes)


def test_evaluate_length_mismatch():
    ising = pubo_to_ising(generate_cyclic(4, 3))
    layout = build_layout(ising, "sa", 1)
    with pytest.raises(ValueError):
        evaluate(ising, layout, [0.1])


@pytest.mark.parametrize("scheme", SCHEMES)
def test_evaluate_matches_gate_oracle(scheme):
    rng = np.random.default_rng(17)
    problems = [four_qubit_hamiltonian(), pubo_to_ising(generate_cyclic(4, 3))]
    for problem in problems:
        for p in (1, 2):
            layout = build_layout(problem, scheme, p)
            params = rng.uniform(-np.pi, np.pi, layout.total)
            got = evaluate(problem, layout, params).amplitudes
            assert np.allclose(got, oracle_state(problem, layout, params), atol=1e-10, rtol=0)


def test_sa_is_special_case_of_ma():
    ising = pubo_to_ising(generate_random(6, 3, [-1, 1], rng_seed=4))
    sa = build_layout(ising, "sa", 2)
    ma = build_layout(ising, "ma", 2)
    params = np.array([0.3, -0.8, 1.1, 0.4])
    ma_params = np.concatenate(
        [[0.3] * len(ising.terms), [-0.8] * 6, [1.1] * len(ising.terms), [0.4] * 6]
    )
    a = evaluate(ising, sa, params).amplitudes
    b = evaluate(ising, ma, ma_params).amplitudes
    assert np.allclose(a, b, atol=1e-12, rtol=0)
    assert np.array_equal(broadcast(sa, params, ma), ma_params)


@pytest.mark.parametrize("scheme", ["sa", "ka", "aa"])
def test_nesting_into_ma(scheme):
    rng = np.random.default_rng(23)
    ising = pubo_to_ising(generate_cyclic(6, 3))
    layout = build_layout(ising, scheme, 2)
    ma = build_layout(ising, "ma", 2)
    params = rng.uniform(-2, 2, layout.total)
    a = evaluate(ising, layout, params).amplitudes
    b = evaluate(ising, ma, broadcast(layout, params, ma)).amplitudes
    assert np.allclose(a, b, atol=1e-12, rtol=0)


def test_broadcast_rejects_coarser_target():
    ising = pubo_to_ising(generate_cyclic(5, 3))
    ma = build_layout(ising, "ma", 1)
    sa = build_layout(ising, "sa", 1)
    with pytest.raises(ValueError):
        broadcast(ma, np.arange(ma.total, dtype=float), sa)


def test_gamma_two_pi_periodicity():
    h = four_qubit_hamiltonian()  # integer coefficients -> integer group diagonals
    rng = np.random.default_rng(31)
    for scheme in SCHEMES:
        layout = build_layout(h, scheme, 2)
        params = rng.uniform(-1, 1, layout.total)
        base = evaluate(h, layout, params).amplitudes
        for slot in list(layout.layer_gamma(0)) + list(layout.layer_gamma(1)):
            shifted = params.copy()
            shifted[slot] += 2 * np.pi
            assert np.allclose(evaluate(h, layout, shifted).amplitudes, base, atol=1e-10, rtol=0)


def test_layer_states_end_with_final_state():
    ising = pubo_to_ising(generate_cyclic(5, 3))
    ansatz = Ansatz(ising, build_layout(ising, "ka", 3))
    params = np.linspace(0.1, 0.9, ansatz.layout.total)
    states = ansatz.layer_states(params)
    assert len(states) == 4
    assert np.array_equal(states[0].amplitudes, plus_state(5).amplitudes)
    assert np.allclose(states[-1].amplitudes, ansatz.state(params).amplitudes, atol=1e-15)


def test_expected_cost_includes_offset():
    p = generate_cyclic(5, 3, wrap=False)
    ising = pubo_to_ising(p)
    ansatz = Ansatz(ising, build_layout(ising, "sa", 1))
    uniform_mean = np.mean(p.energies())
    assert ansatz.expected_cost([0.0, 0.0]) == pytest.approx(uniform_mean, abs=1e-12)


# --------------------------------------------------------------------------
# initialization


def test_tqa_p2():
    ising = pubo_to_ising(generate_cyclic(4, 3))
    layout = build_layout(ising, "ka", 2)
    x = initialize(layout, InitStrategy(InitKind.TQA, dt=0.75))
    assert np.allclose(x[layout.layer_gamma(0).start : layout.layer_gamma(0).stop], 0.375)
    assert np.allclose(x[layout.layer_beta(0).start : layout.layer_beta(0).stop], 0.375)
    assert np.allclose(x[layout.layer_gamma(1).start : layout.layer_gamma(1).stop], 0.75)
    assert np.allclose(x[layout.layer_beta(1).start : layout.layer_beta(1).stop], 0.0)


def test_one_over_p():
    ising = pubo_to_ising(generate_cyclic(5, 3))
    x = initialize(build_layout(ising, "ma", 1), InitStrategy(InitKind.ONE_OVER_P))
    assert np.all(x == 1.0)
    layout = build_layout(ising, "sa", 3)
    x = initialize(layout, InitStrategy(InitKind.ONE_OVER_P))
    assert np.allclose(x, [1, 1, 1 / 2, 1 / 2, 1 / 3, 1 / 3])


@pytest.mark.parametrize("seed", range(5))
def test_random_ranges(seed):
    ising = pubo_to_ising(generate_cyclic(6, 3))
    layout = build_layout(ising, "ma", 4)
    x = initialize(layout, InitStrategy(InitKind.RAND_1_OVER_P, rng_seed=seed))
    last = x[layout.layer_gamma(3).start : layout.layer_beta(3).stop]
    assert np.all((last >= 0) & (last <= 0.25))
    y = initialize(layout, InitStrategy(InitKind.RAND_2PI_OVER_P, rng_seed=seed))
    for l in range(4):
        chunk = y[layout.layer_gamma(l).start : layout.layer_beta(l).stop]
        assert np.all((chunk >= 0) & (chunk <= 2 * np.pi / (l + 1)))


def test_init_determinism():
    ising = pubo_to_ising(generate_cyclic(6, 3))
    layout = build_layout(ising, "ma", 2)
    a = initialize(layout, InitStrategy(InitKind.RAND_2PI_OVER_P, rng_seed=42))
    b = initialize(layout, InitStrategy(InitKind.RAND_2PI_OVER_P, rng_seed=42))
    c = initialize(layout, InitStrategy(InitKind.RAND_2PI_OVER_P, rng_seed=43))
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_strategy_validation_and_parsing():
    with pytest.raises(ValueError):
        InitStrategy(InitKind.TQA, dt=0.0)
    assert InitStrategy.parse("TQA").kind is InitKind.TQA
    assert Scheme.parse("ka").kind is SchemeKind.KA
    with pytest.raises(ValueError):
        Scheme.parse("xx")


# --------------------------------------------------------------------------
# orbits


def test_orbits_symmetric_single_term():
    p = PuboProblem.from_terms(3, [(1.0, [0, 1, 2])])
    terms, verts = find_orbits(p)
    assert verts == [(0, 1, 2)]
    assert terms == [(0,)]
    ising = pubo_to_ising(p)
    terms, verts = find_orbits(ising)
    assert verts == [(0, 1, 2)]
    assert len(terms) == 3  # orders 1, 2, 3 each form one orbit


def test_orbits_asymmetric_reduce_to_ma():
    p = PuboProblem.from_terms(
        5, [(1.0, [0, 1, 2]), (2.0, [1, 2, 3]), (3.0, [2, 3, 4]), (4.0, [0, 3, 4]), (5.0, [0, 1, 4])]
    )
    ising = pubo_to_ising(p)
    terms, verts = find_orbits(ising)
    assert verts == [(v,) for v in range(5)]
    assert len(terms) == len(ising.terms)
    aa = build_layout(ising, Scheme.automorphic(ising), 1)
    assert aa.total == build_layout(ising, "ma", 1).total


def _all_automorphisms(problem):
    return [list(perm) for perm in itertools.permutations(range(problem.n)) if is_automorphism(problem, perm)]


def test_cyclic_n6_search_matches_enumeration_and_dihedral():
    ising = pubo_to_ising(generate_cyclic(6, 3))
    group = _all_automorphisms(ising)  # all 720 permutations checked
    by_search = find_orbits(ising, mode="search")
    by_dihedral = find_orbits(ising, mode="dihedral")
    assert by_search == by_dihedral
    # orbits of the full enumerated group
    orbit_of = {v: sorted({perm[v] for perm in group}) for v in range(6)}
    assert sorted({tuple(o) for o in orbit_of.values()}) == by_search[1]
    assert by_search[1] == [(0, 2, 4), (1, 3, 5)]


@pytest.mark.parametrize("seed", range(4))
def test_found_automorphisms_preserve_terms(seed):
    p = generate_random(7, 3, [-1, 1], rng_seed=seed)
    ising = pubo_to_ising(p)
    for perm in automorphism_generators(ising):
        assert is_automorphism(ising, perm)
        image = sorted(
            (tuple(sorted(perm[v] for v in t.vertices)), t.coefficient) for t in ising.terms
        )
        assert image == sorted((t.vertices, t.coefficient) for t in ising.terms)
    group = _all_automorphisms(ising)
    orbit_of = {v: tuple(sorted({perm[v] for perm in group})) for v in range(7)}
    assert sorted(set(orbit_of.values())) == find_orbits(ising)[1]


def test_orbit_capacity_and_dihedral_fallback():
    big_cyclic = pubo_to_ising(generate_cyclic(14, 3))
    terms, verts = find_orbits(big_cyclic, max_n_for_search=10)
    assert verts == [tuple(range(0, 14, 2)), tuple(range(1, 14, 2))]
    scattered = IsingProblem.from_terms(12, [(1.0, [0, 6]), (1.0, [1, 7])])
    with pytest.raises(CapacityError):
        find_orbits(scattered, max_n_for_search=10)
