from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressed_phase.numerics import (Constant, HamiltonianSchedule, HermiticityError, Sampled,
                                    Trajectory, UnitarityError, evolve_exp, hermitian_eig,
                                    operator_trajectory, pauli, phase_distance, propagate,
                                    random_hermitian, random_unitary, schedule, unitarity_defect,
                                    unitary_eig, wrap_phase)

SX, SY, SZ = pauli()
UP = np.array([1.0, 0.0], dtype=complex)


# hermitian_eig

def test_hermitian_eig_zero():
    evals, V = hermitian_eig(np.zeros((2, 2)))
    assert np.allclose(evals, 0)
    assert unitarity_defect(V) < 1e-12


def test_hermitian_eig_diagonal():
    evals, _ = hermitian_eig(np.diag([1.0, -1.0]))
    assert np.allclose(evals, [-1, 1])


def test_hermitian_eig_sigma_x():
    evals, V = hermitian_eig(SX)
    assert np.allclose(evals, [-1, 1])
    assert abs(abs(np.vdot(V[:, 0], [1, -1])) / np.sqrt(2) - 1) < 1e-12
    assert abs(abs(np.vdot(V[:, 1], [1, 1])) / np.sqrt(2) - 1) < 1e-12


def test_hermitian_eig_rejects_asymmetric():
    with pytest.raises(HermiticityError, match="max"):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize("dim", [2, 5, 8])
def test_hermitian_eig_residual(dim):
    H = random_hermitian(dim, np.random.default_rng(dim))
    evals, V = hermitian_eig(H)
    assert np.all(np.diff(evals) >= 0)
    res = np.linalg.norm(H @ V - V * evals, axis=0)
    assert res.max() <= 1e-10 * np.linalg.norm(H, 2)
    assert unitarity_defect(V) <= 1e-10


# evolve_exp

def test_evolve_exp_sigma_z_quarter():
    assert np.allclose(evolve_exp(SZ, np.pi / 2), np.diag([-1j, 1j]), atol=1e-14)


def test_evolve_exp_zero_time():
    H = random_hermitian(4, np.random.default_rng(1))
    assert np.allclose(evolve_exp(H, 0.0), np.eye(4), atol=1e-14)


def test_evolve_exp_sigma_x_pi():
    assert np.allclose(evolve_exp(SX, np.pi), -np.eye(2), atol=1e-14)


# propagate

def test_propagate_eigenstate():
    U, traj = propagate(schedule(Constant(SZ, np.pi)), UP, 50)
    assert np.allclose(traj.states[-1], -UP, atol=1e-13)
    assert unitarity_defect(U) <= 1e-10


def test_propagate_two_stage():
    vd, th = 0.8, 0.6
    sched = schedule(Constant(vd * SZ, 1.0), Constant(SX, th))
    U, traj = propagate(sched, UP, 10)
    expected = evolve_exp(SX, th) @ evolve_exp(SZ, vd)
    assert np.allclose(U, expected, atol=1e-13)
    assert traj.segment_bounds == ((0, 10), (10, 20))
    assert traj.times[-1] == pytest.approx(1.0 + th)


def test_sampled_constant_generator_matches_constant():
    H = random_hermitian(3, np.random.default_rng(4))
    psi = np.eye(3)[0]
    Uc, _ = propagate(schedule(Constant(H, 1.3)), psi, 1)
    Us, _ = propagate(schedule(Sampled(lambda t: H, 1.3, 37)), psi, 1)
    assert np.max(np.abs(Uc - Us)) <= 1e-12


def test_propagate_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        propagate(schedule(Constant(SZ, 1.0)), np.eye(3)[0], 4)


def test_sampled_rejects_non_hermitian_sample():
    bad = Sampled(lambda t: SZ if t < 0.5 else np.array([[0, 1], [0, 0]]), 1.0, 4)
    with pytest.raises(HermiticityError):
        propagate(schedule(bad), UP, 4)


def test_schedule_validation():
    with pytest.raises(ValueError):
        Constant(SZ, 0.0)
    with pytest.raises(ValueError, match="mismatched"):
        schedule(Constant(SZ, 1.0), Constant(np.eye(3), 1.0))
    with pytest.raises(HermiticityError):
        Constant(np.array([[0, 1j], [1j, 0]]), 1.0)


def _driven(n_steps):
    rng = np.random.default_rng(7)
    A, B = random_hermitian(3, rng), random_hermitian(3, rng)
    return schedule(Sampled(lambda t: A + np.cos(2.0 * t) * B, 2.0, n_steps))


def test_step_halving_is_second_order():
    Us = [propagate(_driven(n), np.eye(3)[0], 1)[0] for n in (64, 128, 256)]
    d1 = np.max(np.abs(Us[1] - Us[0]))
    d2 = np.max(np.abs(Us[2] - Us[1]))
    assert d1 / d2 >= 3.0


def test_norm_drift_along_trajectory():
    _, traj = propagate(_driven(500), np.ones(3) / np.sqrt(3), 1)
    assert np.max(np.abs(np.linalg.norm(traj.states, axis=1) - 1)) <= 1e-9


@pytest.mark.parametrize("c", [2.0, 10.0])
def test_reparameterization_identity(c):
    base = schedule(Constant(random_hermitian(3, np.random.default_rng(2)), 0.9))
    sched = HamiltonianSchedule(base.segments + _driven(40).segments)
    U1, _ = propagate(sched, np.eye(3)[0], 5)
    U2, _ = propagate(sched.scaled(c), np.eye(3)[0], 5)
    assert np.max(np.abs(U1 - U2)) <= 1e-10


def test_keep_steps_reproduces_total():
    sched = HamiltonianSchedule(schedule(Constant(SX, 0.4)).segments
                                + schedule(Sampled(lambda t: np.cos(t) * SZ + SY, 1.0, 9)).segments)
    U, traj = propagate(sched, UP, 6, keep_steps=True)
    assert len(traj.step_propagators) == 6 + 9
    prod = np.eye(2)
    for s in traj.step_propagators:
        prod = s @ prod
    assert np.allclose(prod, U, atol=1e-12)


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0, 1.0]), np.tile(UP, (3, 1)))
    with pytest.raises(ValueError, match="norm"):
        Trajectory(np.array([0.0, 1.0]), np.array([UP, 2 * UP]))


def test_parallel_map_is_bit_identical():
    scheds = [_driven(n) for n in (20, 30, 40, 50)]
    run = lambda s: propagate(s, np.eye(3)[0], 1)[0]
    seq = [run(s) for s in scheds]
    with ThreadPoolExecutor(4) as ex:
        par = list(ex.map(run, scheds))
    for a, b in zip(seq, par):
        assert np.array_equal(a, b)


def test_operator_trajectory_constant_segments_are_exact():
    ops, _ = operator_trajectory(schedule(Constant(SX, 1.0)), 8)
    for t, U in zip(ops.times(), ops.propagators()):
        assert np.allclose(U, evolve_exp(SX, t), atol=1e-14)


# unitary_eig

def test_unitary_eig_identity():
    phases, V = unitary_eig(np.eye(3))
    assert np.allclose(phases, 0)
    assert unitarity_defect(V) < 1e-12


def test_unitary_eig_diagonal():
    phases, _ = unitary_eig(np.diag(np.exp([1j * np.pi / 4, -1j * np.pi / 4])))
    assert np.allclose(phases, [-np.pi / 4, np.pi / 4])


def test_unitary_eig_minus_identity_uses_upper_branch():
    phases, _ = unitary_eig(evolve_exp(SZ, np.pi))
    assert np.allclose(phases, np.pi)


def test_unitary_eig_rejects_non_unitary():
    with pytest.raises(UnitarityError, match="max"):
        unitary_eig(np.diag([1.0, 2.0]))


def _check_eig(W, phases, V):
    res = np.linalg.norm(W @ V - V * np.exp(1j * phases), axis=0)
    assert res.max() <= 1e-9
    assert unitarity_defect(V) <= 1e-9
    assert np.all(phases > -np.pi) and np.all(phases <= np.pi)


@pytest.mark.parametrize("seed", range(5))
def test_unitary_eig_haar(seed):
    rng = np.random.default_rng(seed)
    W = random_unitary(6, rng)
    _check_eig(W, *unitary_eig(W))


def test_unitary_eig_degenerate_spaces_are_orthonormal():
    rng = np.random.default_rng(11)
    Q = random_unitary(5, rng)
    W = Q @ np.diag(np.exp(1j * np.array([0.3, 0.3, 0.3 + 1e-10, -2.0, -2.0]))) @ Q.conj().T
    phases, V = unitary_eig(W)
    _check_eig(W, phases, V)
    assert len(set(np.round(phases, 12))) == 2


def test_unitary_eig_degenerate_across_branch_cut():
    rng = np.random.default_rng(12)
    Q = random_unitary(3, rng)
    W = Q @ np.diag(np.exp(1j * np.array([np.pi - 1e-11, -np.pi + 1e-11, 0.5]))) @ Q.conj().T
    phases, V = unitary_eig(W)
    _check_eig(W, phases, V)
    assert np.sum(np.isclose(phases, np.pi, atol=1e-9)) == 2


def test_unitary_eig_is_deterministic():
    W = random_unitary(4, np.random.default_rng(3))
    a, b = unitary_eig(W), unitary_eig(W.copy())
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_unitary_eig_residual_property(seed, dim):
    W = random_unitary(dim, np.random.default_rng(seed))
    _check_eig(W, *unitary_eig(W))


@given(st.floats(-1e3, 1e3, allow_nan=False))
def test_wrap_phase_branch(x):
    y = float(wrap_phase(x))
    assert -np.pi < y <= np.pi
    assert abs(np.exp(1j * x) - np.exp(1j * y)) < 1e-9


def test_wrap_phase_endpoints():
    assert wrap_phase(-np.pi) == pytest.approx(np.pi)
    assert wrap_phase(np.pi) == pytest.approx(np.pi)
    assert phase_distance(np.pi - 1e-12, -np.pi + 1e-12) < 1e-11
