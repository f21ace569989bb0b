import numpy as np
import pytest

from qoptbench.pauli import diagonal_energies, is_diagonal, simplify
from qoptbench.problems import (
    ProblemInstance,
    brute_force_classical,
    build_hamiltonian,
    classical_costs,
    decode_knapsack_selection,
    exact_ground_subspace,
    gen_knapsack,
    gen_maxcut,
    gen_numpart,
    gen_spinglass,
    instance_from_json,
    instance_to_json,
    knapsack_constrained_optimum,
    read_suite,
    write_suite,
)
from qoptbench.pauli import PauliSum
from qoptbench.states import basis_state, expectation


def terms_of(h):
    return [(t.coeff, t.letters) for t in h.terms]


def test_maxcut_single_edge_hamiltonian():
    inst = ProblemInstance("maxcut", 2, {"edges": [[0, 1]]}, 0)
    h = build_hamiltonian(inst)
    assert terms_of(h) == [(-0.5, "II"), (0.5, "ZZ")]


def test_numpart_ones_hamiltonian():
    inst = ProblemInstance("numpart", 2, {"numbers": [1, 1]}, 0)
    h = build_hamiltonian(inst)
    assert terms_of(h) == [(2.0, "II"), (2.0, "ZZ")]


def test_knapsack_single_item_costs():
    inst = ProblemInstance(
        "knapsack",
        1,
        {"weights": [2], "values": [3], "capacity": 2, "penalty": 6},
        0,
    )
    h = build_hamiltonian(inst)
    # bit 0 (index 0) means selected: cost -3; bit 1 (index 1): cost +24
    assert expectation(basis_state(1, 0), h) == pytest.approx(-3.0)
    assert expectation(basis_state(1, 1), h) == pytest.approx(24.0)


def test_spinglass_hamiltonian_terms():
    jx = [[0.0, 0.3], [0.0, 0.0]]
    jy = [[0.0, -0.2], [0.0, 0.0]]
    jz = [[0.0, 0.5], [0.0, 0.0]]
    inst = ProblemInstance("spinglass", 2, {"jx": jx, "jy": jy, "jz": jz}, 0)
    h = build_hamiltonian(inst)
    assert terms_of(h) == [(0.3, "XX"), (-0.2, "YY"), (0.5, "ZZ")]


def test_gen_maxcut_complete_graph():
    inst = gen_maxcut(3, edge_probability=1.0, seed=0)
    assert sorted(map(tuple, inst.edges)) == [(0, 1), (0, 2), (1, 2)]


def test_gen_maxcut_deterministic_and_nonempty():
    a = gen_maxcut(5, seed=42)
    b = gen_maxcut(5, seed=42)
    assert a.payload == b.payload
    for seed in range(50):
        assert len(gen_maxcut(5, seed=seed).edges) >= 1


def test_gen_maxcut_edge_statistics():
    # 250 draws of binomial(10, 0.5): mean within 5 sigma
    counts = [len(gen_maxcut(5, seed=s).edges) for s in range(250)]
    mean = np.mean(counts)
    sigma = np.sqrt(10 * 0.25 / 250)
    # empty-set rejection biases upward slightly; tolerance absorbs it
    assert abs(mean - 5.0) < 5 * sigma + 10 * (0.5**10)


def test_gen_numpart_scale():
    # typical Hamiltonian scale O(1e4), hard bound (5*100)^2
    for seed in range(20):
        inst = gen_numpart(5, seed=seed)
        assert all(1 <= v <= 100 for v in inst.payload["numbers"])
        h = build_hamiltonian(inst)
        energies = diagonal_energies(h)
        assert energies.max() <= (5 * 100) ** 2
    assert energies.max() >= 1e3  # typical scale


def test_gen_knapsack_scale_and_invariants():
    for seed in range(20):
        inst = gen_knapsack(5, seed=seed)
        assert inst.penalty == 2 * max(inst.payload["values"])
        scale = inst.penalty * inst.capacity**2
        assert 1e4 < scale < 1e7


def test_gen_deterministic():
    for gen in (gen_numpart, gen_knapsack, gen_spinglass):
        assert gen(5, seed=9).payload == gen(5, seed=9).payload


def test_gen_spinglass_bounds_and_mean():
    draws = []
    for seed in range(40):
        inst = gen_spinglass(5, seed=seed)
        jx, jy, jz = inst.couplings()
        vals = np.concatenate(
            [m[np.triu_indices(5, k=1)] for m in (jx, jy, jz)]
        )
        draws.append(vals)
    allv = np.concatenate(draws)
    assert np.all(np.abs(allv) < 1.0)
    assert abs(allv.mean()) < 5 * 0.3 / np.sqrt(allv.size)


def test_brute_force_single_edge():
    inst = ProblemInstance("maxcut", 2, {"edges": [[0, 1]]}, 0)
    truth = brute_force_classical(inst)
    assert truth.energy == -1.0
    assert truth.degeneracy == 2
    assert sorted(truth.optimal_bitstrings) == ["01", "10"]


def test_brute_force_numpart_ones():
    inst = ProblemInstance("numpart", 2, {"numbers": [1, 1]}, 0)
    truth = brute_force_classical(inst)
    assert truth.energy == 0.0
    assert truth.degeneracy == 2


def test_brute_force_rejects_spinglass():
    inst = gen_spinglass(3, seed=0)
    with pytest.raises(ValueError):
        brute_force_classical(inst)


def test_exact_ground_subspace_single_z():
    truth = exact_ground_subspace(PauliSum.from_terms(1, [(1.0, "Z")]))
    assert truth.energy == pytest.approx(-1.0)
    assert truth.degeneracy == 1
    assert np.allclose(np.abs(truth.subspace[0].amps), [0.0, 1.0])


def test_exact_ground_subspace_zero_hamiltonian():
    truth = exact_ground_subspace(PauliSum.zero(2))
    assert truth.degeneracy == 4


def test_exact_ground_subspace_rejects_nonhermitian():
    with pytest.raises(ValueError):
        exact_ground_subspace(PauliSum.from_terms(1, [(1j, "Z")]))


def test_cross_oracle_agreement():
    for kind, gen in (("maxcut", gen_maxcut), ("numpart", gen_numpart), ("knapsack", gen_knapsack)):
        for seed in range(10):
            inst = gen(4, seed=seed)
            bf = brute_force_classical(inst)
            eig = exact_ground_subspace(build_hamiltonian(inst))
            assert bf.energy == pytest.approx(eig.energy, abs=1e-9), (kind, seed)
            assert bf.degeneracy == eig.degeneracy, (kind, seed)


def test_hamiltonian_matches_classical_costs():
    for gen in (gen_maxcut, gen_numpart, gen_knapsack):
        for seed in range(10):
            inst = gen(5, seed=seed)
            d = diagonal_energies(build_hamiltonian(inst))
            assert np.allclose(d, classical_costs(inst), atol=1e-9)


def test_basis_expectation_matches_brute_force_minimum():
    inst = gen_maxcut(4, seed=3)
    h = build_hamiltonian(inst)
    truth = brute_force_classical(inst)
    energies = [expectation(basis_state(4, k), h) for k in range(16)]
    assert min(energies) == pytest.approx(truth.energy, abs=1e-9)


def test_knapsack_penalty_faithfulness():
    for seed in range(25):
        inst = gen_knapsack(5, seed=seed)
        truth = brute_force_classical(inst)
        opt = knapsack_constrained_optimum(inst)
        for bs in truth.optimal_bitstrings:
            value, load = decode_knapsack_selection(inst, bs)
            assert load <= inst.capacity
            assert value == opt


def test_z2_symmetry_of_ground_sets():
    for gen in (gen_maxcut, gen_numpart):
        for seed in range(10):
            inst = gen(5, seed=seed)
            truth = brute_force_classical(inst)
            opt = set(truth.optimal_bitstrings)
            for bs in opt:
                flipped = "".join("1" if c == "0" else "0" for c in bs)
                assert flipped in opt


def test_instance_json_roundtrip_bit_exact(tmp_path):
    suite = (
        [gen_maxcut(5, seed=s) for s in range(3)]
        + [gen_numpart(5, seed=s) for s in range(3)]
        + [gen_knapsack(5, seed=s) for s in range(3)]
        + [gen_spinglass(5, seed=s) for s in range(3)]
    )
    path = tmp_path / "suite.jsonl"
    write_suite(suite, path)
    back = read_suite(path)
    assert len(back) == len(suite)
    for a, b in zip(suite, back):
        assert a == b
    # byte-identical rewrite
    path2 = tmp_path / "suite2.jsonl"
    write_suite(back, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_instance_json_is_one_line_and_self_describing():
    inst = gen_knapsack(5, seed=1)
    line = instance_to_json(inst)
    assert "\n" not in line
    assert instance_from_json(line) == inst


def test_instance_validation():
    with pytest.raises(ValueError):
        ProblemInstance("maxcut", 2, {"edges": [[0, 0]]}, 0)
    with pytest.raises(ValueError):
        ProblemInstance("maxcut", 2, {"edges": [[0, 1], [1, 0]]}, 0)
    with pytest.raises(ValueError):
        ProblemInstance(
            "knapsack",
            2,
            {"weights": [1, 1], "values": [2, 3], "capacity": 1, "penalty": 5},
            0,
        )
    with pytest.raises(ValueError):
        ProblemInstance(
            "spinglass",
            2,
            {"jx": [[0, 1.5], [0, 0]], "jy": [[0, 0], [0, 0]], "jz": [[0, 0], [0, 0]]},
            0,
        )
    with pytest.raises(ValueError):
        ProblemInstance("partition", 2, {"numbers": [1, 1]}, 0)


def test_all_hamiltonians_diagonal_except_spinglass():
    assert is_diagonal(build_hamiltonian(gen_maxcut(4, seed=0)))
    assert is_diagonal(build_hamiltonian(gen_numpart(4, seed=0)))
    assert is_diagonal(build_hamiltonian(gen_knapsack(4, seed=0)))
    assert not is_diagonal(build_hamiltonian(gen_spinglass(4, seed=0)))
