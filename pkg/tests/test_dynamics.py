import numpy as np
import pytest

from qoptbench.dynamics import (
    IntegrationError,
    Schedule,
    constant_schedule,
    driver_hamiltonian,
    imag_time_evolve,
    qa_schedule,
    real_time_evolve,
    truncate_bond_dimension,
)
from qoptbench.pauli import PauliSum, simplify
from qoptbench.problems import GroundTruth, gen_maxcut, build_hamiltonian, ground_truth_for
from qoptbench.states import StateVector, basis_state, inner, plus_state


def _two_level_truth():
    return GroundTruth(-1.0, 1, [basis_state(1, 1)], ["1"])


def test_qa_schedule_endpoints_term_for_term():
    h = build_hamiltonian(gen_maxcut(3, seed=2))
    sched = qa_schedule(h, 7.0)
    start = sched.hamiltonian_at(0.0)
    assert start.terms == driver_hamiltonian(3).terms
    end = sched.hamiltonian_at(7.0)
    assert end.terms == simplify(h).terms


def test_qa_schedule_midpoint_is_mean():
    h = build_hamiltonian(gen_maxcut(3, seed=2))
    sched = qa_schedule(h, 10.0)
    mid = sched.hamiltonian_at(5.0)
    expected = simplify(0.5 * driver_hamiltonian(3) + 0.5 * h)
    assert [(t.coeff, t.letters) for t in mid.terms] == [
        (t.coeff, t.letters) for t in expected.terms
    ]


def test_real_time_driver_eigenstate_stationary():
    n = 3
    sched = constant_schedule(driver_hamiltonian(n), 5.0)
    traj = real_time_evolve(sched, plus_state(n), dt=1e-2)
    overlap = abs(inner(traj.final_state, plus_state(n))) ** 2
    assert overlap == pytest.approx(1.0, abs=1e-8)


def test_real_time_rabi_period():
    X = PauliSum.from_terms(1, [(1.0, "X")])
    traj = real_time_evolve(constant_schedule(X, np.pi), basis_state(1, 0), dt=np.pi / 1000)
    assert traj.final_state.amps[0] == pytest.approx(-1.0, abs=1e-8)
    fid = abs(inner(traj.final_state, basis_state(1, 0))) ** 2
    assert fid == pytest.approx(1.0, abs=1e-8)


def test_real_time_adiabatic_fixture_monotone():
    inst = gen_maxcut(5, seed=11)
    h = build_hamiltonian(inst)
    truth = ground_truth_for(inst)
    fids = []
    for T in (1.0, 5.0, 20.0, 100.0):
        traj = real_time_evolve(qa_schedule(h, T), plus_state(5), dt=1e-2, truth=truth)
        fids.append(traj.fidelities[-1])
    assert all(b >= a for a, b in zip(fids, fids[1:])), fids


def test_real_time_norm_drift_guard():
    # numbers this large need a far smaller dt; the guard must catch it
    h = PauliSum.from_terms(1, [(1e4, "X")])
    with pytest.raises(IntegrationError):
        real_time_evolve(constant_schedule(h, 1.0), basis_state(1, 0), dt=1e-2)


def test_imag_time_two_level_closed_form():
    Z = PauliSum.from_terms(1, [(1.0, "Z")])
    truth = _two_level_truth()
    for tau in (0.5, 1.0, 2.0):
        traj = imag_time_evolve(Z, plus_state(1), dt=1e-3, T=tau, truth=truth)
        expected = np.exp(2 * tau) / (np.exp(2 * tau) + np.exp(-2 * tau))
        assert traj.fidelities[-1] == pytest.approx(expected, abs=1e-6)


def test_imag_time_eigenstate_stationary():
    Z = PauliSum.from_terms(1, [(1.0, "Z")])
    traj = imag_time_evolve(Z, basis_state(1, 1), dt=1e-2, T=1.0)
    assert abs(inner(traj.final_state, basis_state(1, 1))) ** 2 == pytest.approx(
        1.0, abs=1e-8
    )


def test_imag_time_energy_monotone():
    inst = gen_maxcut(4, seed=5)
    h = build_hamiltonian(inst)
    traj = imag_time_evolve(h, plus_state(4), dt=1e-2, T=5.0, record_every=1)
    diffs = np.diff(traj.energies)
    assert np.all(diffs <= 1e-9)


def test_imag_time_guard_violation():
    h = PauliSum.from_terms(1, [(1e4, "Z")])
    with pytest.raises(IntegrationError):
        imag_time_evolve(h, plus_state(1), dt=1e-3, T=1.0)


def test_imag_time_warns_above_guideline():
    h = PauliSum.from_terms(1, [(5.0, "Z")])
    with pytest.warns(UserWarning):
        imag_time_evolve(h, plus_state(1), dt=0.1, T=1.0)


def test_integrators_fourth_order_convergence():
    inst = gen_maxcut(3, seed=9)
    h = build_hamiltonian(inst)
    truth = ground_truth_for(inst)
    sched = qa_schedule(h, 2.0)

    def final_state(evolver, dt, **kw):
        return evolver(sched, plus_state(3), dt, **kw).final_state.amps

    for evolver in (real_time_evolve, imag_time_evolve):
        ref = final_state(evolver, 1e-3)
        err_coarse = np.linalg.norm(final_state(evolver, 0.05) - ref)
        err_fine = np.linalg.norm(final_state(evolver, 0.025) - ref)
        ratio = err_coarse / err_fine
        assert ratio > 10.0, (evolver.__name__, ratio)


def test_truncate_product_state_unchanged():
    s = plus_state(4)
    out, discarded = truncate_bond_dimension(s, 1)
    assert np.max(np.abs(out.amps - s.amps)) < 1e-12
    assert discarded < 1e-20


def test_truncate_full_rank_identity():
    rng = np.random.default_rng(8)
    amps = rng.normal(size=16) + 1j * rng.normal(size=16)
    s = StateVector(4, amps / np.linalg.norm(amps))
    out, discarded = truncate_bond_dimension(s, 2 ** (4 // 2))
    assert np.max(np.abs(out.amps - s.amps)) < 1e-12
    assert discarded == 0.0


def test_truncate_bell_state():
    bell = StateVector(2, np.array([1, 0, 0, 1]) / np.sqrt(2))
    out, discarded = truncate_bond_dimension(bell, 1)
    assert abs(inner(out, bell)) ** 2 == pytest.approx(0.5, abs=1e-12)
    assert discarded == pytest.approx(0.5, abs=1e-12)


def test_truncation_mode_exact_for_low_rank_evolution():
    # diagonal H keeps a product state product; chi=n must reproduce exactly
    inst = gen_maxcut(4, seed=7)
    h = build_hamiltonian(inst)
    truth = ground_truth_for(inst)
    plain = imag_time_evolve(h, plus_state(4), dt=0.1, T=10.0, truth=truth)
    tn = imag_time_evolve(h, plus_state(4), dt=0.1, T=10.0, truth=truth, bond_dim=4)
    assert np.max(np.abs(plain.final_state.amps - tn.final_state.amps)) < 1e-10
    assert np.max(np.abs(plain.fidelities - tn.fidelities)) < 1e-10


def test_trajectory_invariants_and_csv(tmp_path):
    Z = PauliSum.from_terms(1, [(1.0, "Z")])
    traj = imag_time_evolve(Z, plus_state(1), dt=0.1, T=1.0, truth=_two_level_truth())
    assert len(traj.times) == len(traj.energies) == len(traj.fidelities)
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(1.0)
    assert np.all(np.diff(traj.times) > 0)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,energy,fidelity"
    assert len(lines) == len(traj.times) + 1


def test_step_count_must_be_integral():
    Z = PauliSum.from_terms(1, [(1.0, "Z")])
    with pytest.raises(ValueError):
        imag_time_evolve(Z, plus_state(1), dt=0.3, T=1.0)
