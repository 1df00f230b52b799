import numpy as np
import pytest

from dressed_phase import models
from dressed_phase.models import (ChainSpec, LambdaLoopSpec, QubitScheduleSpec, RingModel,
                                  RingSpec, TransferNotFound)
from dressed_phase.numerics import (evolve_exp, hermitian_eig, hermiticity_defect, pauli,
                                    propagate)

SX, SY, SZ = pauli()


def test_chain_two_sites():
    H = models.build_xy_chain(ChainSpec(2, J=1.7))
    assert np.allclose(H, [[0, 0.85], [0.85, 0]])


def test_chain_four_sites_couplings():
    H = models.build_xy_chain(ChainSpec(4, J=2.0))
    assert np.allclose(np.diag(H, 1), 2.0 * np.array([np.sqrt(3) / 2, 1.0, np.sqrt(3) / 2]))
    assert np.allclose(np.diag(H), 0)
    assert hermiticity_defect(H) == 0


@pytest.mark.parametrize("N", [2, 3, 6, 9])
def test_chain_spectrum_is_angular_momentum_ladder(N):
    J = 1.3
    evals, _ = hermitian_eig(models.build_xy_chain(ChainSpec(N, J)))
    assert np.allclose(evals, J * (np.arange(N) - (N - 1) / 2), atol=1e-12)


def test_chain_rejects_short():
    with pytest.raises(ValueError):
        ChainSpec(1)
    with pytest.raises(ValueError):
        ChainSpec(3, J=0.0)


def test_transfer_signature_two_sites():
    # exp(-i (pi/2) sigma_x) = -i sigma_x
    sig = models.measure_transfer_signature(ChainSpec(2))
    assert sig.transfer_time == pytest.approx(np.pi, abs=1e-9)
    assert abs(sig.r - (-1j)) < 1e-9


@pytest.mark.parametrize("N", range(2, 13))
def test_transfer_signature_invariants(N):
    J = 0.7
    sig = models.measure_transfer_signature(ChainSpec(N, J))
    assert abs(abs(sig.r) - 1) <= 1e-9
    assert abs(sig.transfer_time * J - np.pi) <= 1e-6
    assert abs(sig.r ** 2 - np.exp(1j * np.pi * (N - 1))) <= 1e-8


def test_transfer_signature_parity_examples():
    assert abs(models.measure_transfer_signature(ChainSpec(4)).r ** 2 + 1) < 1e-9
    assert abs(models.measure_transfer_signature(ChainSpec(5)).r ** 2 - 1) < 1e-9


def test_transfer_not_found_for_uniform_chain():
    H = np.diag(np.ones(5), 1) + np.diag(np.ones(5), -1)
    with pytest.raises(TransferNotFound):
        models.transfer_signature_of(H.astype(complex), 4 * np.pi)


def test_swap_gate_two_sites_is_pure_swap():
    G = models.build_chain_swap_gate(ChainSpec(2))
    assert np.allclose(G, [[0, 1], [1, 0]], atol=1e-9)


@pytest.mark.parametrize("N", range(2, 11))
def test_swap_gate_involution_and_mirror(N):
    G = models.build_chain_swap_gate(ChainSpec(N))
    assert np.max(np.abs(G @ G - np.eye(N))) <= 1e-9
    e1 = np.eye(N)[0]
    assert abs((G @ e1)[-1] - 1) <= 1e-9


def test_rotation_gate_examples():
    assert np.allclose(models.build_rotation_gate(0.0), np.eye(2))
    assert np.allclose(models.build_rotation_gate(np.pi / 2, "x"), -1j * SX)
    for axis in "xyz":
        assert np.allclose(models.build_rotation_gate(np.pi, axis), -np.eye(2))
    assert np.allclose(models.build_rotation_gate(0.3, "y"), evolve_exp(SY, 0.3))
    with pytest.raises(ValueError):
        models.build_rotation_gate(1.0, "w")


def test_qubit_schedule_total_propagator():
    spec = QubitScheduleSpec(varpi=1.1, delta=0.5, omega=2.0, theta0=0.7)
    U, _ = propagate(models.build_qubit_schedule(spec), np.array([1, 0]), 1)
    assert np.allclose(U, evolve_exp(SX, 0.7) @ evolve_exp(SZ, 0.55), atol=1e-13)
    G = models.build_rotation_gate(0.7)
    assert np.allclose(G.conj().T @ U, evolve_exp(SZ, 0.55), atol=1e-13)
    assert spec.tau == pytest.approx(0.5 + 0.35)


def test_qubit_schedule_pi_phase_gives_minus_gate():
    spec = QubitScheduleSpec(varpi=np.pi, delta=1.0, omega=1.0, theta0=0.9)
    U, _ = propagate(models.build_qubit_schedule(spec), np.array([1, 0]), 1)
    assert np.allclose(U, -models.build_rotation_gate(0.9), atol=1e-12)


def test_qubit_schedule_omega_rescaling():
    a = QubitScheduleSpec(1.0, 0.4, 1.0, 1.2)
    b = QubitScheduleSpec(1.0, 0.4, 2.0, 1.2)
    Ua, _ = propagate(models.build_qubit_schedule(a), np.array([1, 0]), 1)
    Ub, _ = propagate(models.build_qubit_schedule(b), np.array([1, 0]), 1)
    assert np.allclose(Ua, Ub, atol=1e-13)


def test_qubit_spec_validation():
    with pytest.raises(ValueError):
        QubitScheduleSpec(1.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        QubitScheduleSpec(1.0, 1.0, 1.0, 7.0)


# Lambda system

def test_lambda_theta_zero():
    H = models.lambda_hamiltonian(0.0, 1.234)
    expected = np.zeros((3, 3))
    expected[2, 0] = expected[0, 2] = 1.0
    assert np.allclose(H, expected)


@pytest.mark.parametrize("theta,phi", [(0.0, 0.0), (0.4, 1.0), (np.pi / 2, 3.0), (2.5, -1.2)])
def test_dark_state_of_dressed_hamiltonian(theta, phi):
    G = models.lambda_swap_gate()
    H = models.lambda_hamiltonian(theta, phi)
    D = models.dark_state(theta, phi)
    assert np.linalg.norm(G.conj().T @ H @ G @ D) <= 1e-12
    # the bare Hamiltonian's zero mode is the swapped state
    assert np.linalg.norm(H @ (G @ D)) <= 1e-12


def test_lambda_schedule_samples():
    spec = LambdaLoopSpec(np.pi / 3, 30.0)
    sched = models.build_lambda_schedule(spec, 20)
    G = models.lambda_swap_gate()
    for seg, (d, leg) in zip(sched.segments, spec.legs()):
        for t in np.linspace(0, d, 21):
            H = seg.hamiltonian(t)
            assert hermiticity_defect(H) <= 1e-12
            evals, _ = hermitian_eig(H)
            assert np.allclose(evals, [-1, 0, 1], atol=1e-12)
            assert np.linalg.norm(G @ H @ G @ models.dark_state(*leg(t))) <= 1e-12
    assert sched.total_duration == pytest.approx(30.0)


def test_lambda_loop_is_closed_and_continuous():
    spec = LambdaLoopSpec(1.0, 8.0)
    (d1, l1), (d2, l2), (d3, l3) = spec.legs()
    assert l1(0.0)[0] == 0 and l3(d3)[0] == pytest.approx(0.0)
    assert l1(d1) == pytest.approx(l2(0.0))
    assert l2(d2) == pytest.approx(l3(0.0))
    assert spec.path(8.0)[0] == pytest.approx(0.0)


def test_lambda_open_path_rejected():
    class Open(LambdaLoopSpec):
        def legs(self):
            return [(1.0, lambda t: (0.5 * t, 0.0))]

    with pytest.raises(ValueError, match="theta = 0"):
        models.build_lambda_schedule(Open(1.0, 1.0), 4)


# ring

def test_ring_independent_arms_match_chain_oracle():
    upper, lower = models.build_ring_hamiltonian(RingSpec(7, 5))
    assert upper.shape == (7, 7) and lower.shape == (5, 5)
    assert np.allclose(upper, -models.build_xy_chain(ChainSpec(7)))
    sig = models.transfer_signature_of(upper, 4 * np.pi)
    chain = models.measure_transfer_signature(ChainSpec(7))
    # -H evolves with the complex-conjugate propagator
    assert abs(sig.r - np.conj(chain.r)) < 1e-9
    assert sig.transfer_time == pytest.approx(chain.transfer_time, abs=1e-8)


def test_coupled_ring_three_three():
    spec = RingSpec(3, 3, model=RingModel.COUPLED_RING)
    H = models.build_ring_hamiltonian(spec)
    assert H.shape == (4, 4)
    assert hermiticity_defect(H) == 0
    degree = np.count_nonzero(np.abs(H) > 0, axis=1)
    assert list(degree) == [2, 2, 2, 2]
    for arm in ("upper", "lower"):
        s = spec.arm_sites(arm)
        assert s[0] == 0 and s[-1] == spec.N_U - 1
        assert np.allclose([H[s[i], s[i + 1]] for i in range(2)], -np.sqrt(2) / 2)


def test_coupled_ring_seven_five_structure():
    spec = RingSpec(7, 5, model=RingModel.COUPLED_RING)
    H = models.build_ring_hamiltonian(spec)
    assert H.shape == (10, 10)
    degree = np.count_nonzero(np.abs(H) > 0, axis=1)
    assert np.all(degree == 2)
    a, b = 0, spec.N_U - 1
    assert H[a, b] == 0


def test_ring_validation():
    with pytest.raises(ValueError):
        RingSpec(1, 5)
