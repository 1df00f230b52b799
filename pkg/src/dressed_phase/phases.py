"""
Dressed states and the dynamical / geometric split of their phases.

For a gate G and a propagator U(tau), the eigenvectors of W = G^dag U(tau)
are initial states for which U(tau) acts as G up to a phase. That phase is
split into the dynamical integral of the dressed Hamiltonian G^dag H(t) G
along the bare trajectory and a geometric remainder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import (HamiltonianSchedule, Trajectory, as_matrix, as_state,
                       check_hermitian, check_unitary, operator_trajectory, phase_distance,
                       propagate, unitary_eig, wrap_phase)

PHASE_TOL = 1e-8
AMPLITUDE_CUTOFF = 1e-12
D_CONVENTION = "bare-trajectory"


class EstimatorBreakdown(RuntimeError):
    pass


def _check_pair(G, U) -> tuple[np.ndarray, np.ndarray]:
    G, U = as_matrix(G), as_matrix(U)
    if G.shape != U.shape:
        raise ValueError(f"gate {G.shape} and propagator {U.shape} dimensions differ")
    return check_unitary(G), check_unitary(U)


def dressed_operator(G, U) -> np.ndarray:
    """W = G^dag U."""
    G, U = _check_pair(G, U)
    return G.conj().T @ U


def dressed_hamiltonian(G, H) -> np.ndarray:
    """The gate-conjugated generator G^dag H G."""
    G, H = as_matrix(G), check_hermitian(H)
    if G.shape != H.shape:
        raise ValueError(f"gate {G.shape} and Hamiltonian {H.shape} dimensions differ")
    M = G.conj().T @ H @ G
    return 0.5 * (M + M.conj().T)


@dataclass(frozen=True)
class DressedDecomposition:
    gate: np.ndarray
    propagator: np.ndarray
    dressed_operator: np.ndarray
    eigenphases: np.ndarray
    dressed_states: np.ndarray  # columns

    def state(self, k: int) -> np.ndarray:
        return self.dressed_states[:, k]

    def eigen_residual(self) -> float:
        """max_k |W Psi_k - e^{i phi_k} Psi_k|."""
        V = self.dressed_states
        return float(np.max(np.linalg.norm(self.dressed_operator @ V - V * np.exp(1j * self.eigenphases), axis=0)))

    def gate_residual(self) -> float:
        """max_k |U Psi_k - e^{i phi_k} G Psi_k|."""
        V = self.dressed_states
        lhs = self.propagator @ V
        rhs = (self.gate @ V) * np.exp(1j * self.eigenphases)
        return float(np.max(np.linalg.norm(lhs - rhs, axis=0)))


def dressed_eigensystem(G, U) -> DressedDecomposition:
    W = dressed_operator(G, U)
    phases, vecs = unitary_eig(W)
    return DressedDecomposition(np.asarray(G, dtype=np.complex128),
                                np.asarray(U, dtype=np.complex128), W, phases, vecs)


# ---------------------------------------------------------------------------
# dynamical part


def _trapezoid_weights(times: np.ndarray) -> np.ndarray:
    w = np.zeros_like(times)
    dt = np.diff(times)
    w[:-1] += 0.5 * dt
    w[1:] += 0.5 * dt
    return w


def dynamical_phase_from_trajectory(G, sched: HamiltonianSchedule, traj: Trajectory) -> float:
    """Trapezoidal integral of <psi(t)| G^dag H(t) G |psi(t)> along a stored path.

    Each segment is integrated on its own, so a Hamiltonian that jumps at a
    segment boundary is evaluated on the correct side of the jump.
    """
    G = as_matrix(G)
    Gd = G.conj().T
    total = 0.0
    for seg, (i0, i1) in zip(sched.segments, traj.segment_bounds):
        times = traj.times[i0:i1 + 1]
        chis = traj.states[i0:i1 + 1] @ Gd.T  # rows: G psi(t_j)
        local = times - times[0]
        vals = np.array([np.vdot(c, seg.hamiltonian(t) @ c).real for c, t in zip(chis, local)])
        total += float(np.dot(_trapezoid_weights(times), vals))
    return total


def dynamical_phase(G, sched: HamiltonianSchedule, psi0, samples_per_segment: int = 2000) -> float:
    """D = int_0^tau <U(t) psi0| G^dag H(t) G |U(t) psi0> dt, not wrapped."""
    G = as_matrix(G)
    if G.shape[0] != sched.dim:
        raise ValueError(f"gate dimension {G.shape[0]} does not match schedule dimension {sched.dim}")
    _, traj = propagate(sched, psi0, samples_per_segment)
    return dynamical_phase_from_trajectory(G, sched, traj)


def dynamical_phase_operator(G, sched: HamiltonianSchedule, samples_per_segment: int = 2000) -> np.ndarray:
    """Hermitian M with D(psi0) = <psi0|M|psi0>.

    Uses the same trapezoidal rule as :func:`dynamical_phase`, so it is the
    cheap route for sweeping many initial states through one schedule.
    """
    G = as_matrix(G)
    Gd = G.conj().T
    ops, _ = operator_trajectory(sched, samples_per_segment)
    M = np.zeros((sched.dim, sched.dim), dtype=np.complex128)
    for s in ops.segments:
        w = _trapezoid_weights(s.local_times)
        dressed = Gd @ s.hamiltonians @ G
        M += np.einsum("t,tki,tkl,tlj->ij", w, s.propagators.conj(), dressed, s.propagators)
    return 0.5 * (M + M.conj().T)


# ---------------------------------------------------------------------------
# geometric part


@dataclass(frozen=True)
class PhaseBreakdown:
    total_phase: float
    dynamical: float
    geometric: float
    convention: str = D_CONVENTION

    def __post_init__(self):
        gap = phase_distance(self.geometric, self.total_phase + self.dynamical)
        if gap > 1e-9:
            raise ValueError(f"beta - phi - D = {gap:.3e} (mod 2 pi)")


def aa_phase(phi_total: float, dynamical: float) -> float:
    """beta = phi + D on the principal branch."""
    return float(wrap_phase(phi_total + dynamical))


def phase_breakdown(phi_total: float, dynamical: float) -> PhaseBreakdown:
    return PhaseBreakdown(float(phi_total), float(dynamical), aa_phase(phi_total, dynamical))


def open_path_geometric_phase(traj: Trajectory, min_overlap: float = 1e-6) -> float:
    """Discrete gauge-invariant estimator from pairwise overlaps.

    arg<psi_0|psi_last> - sum_j arg<psi_j|psi_j+1>. For a cyclic path this is
    the Aharonov-Anandan phase.
    """
    psi = traj.states
    if len(psi) < 3:
        raise ValueError("estimator needs at least three samples")
    links = np.einsum("ti,ti->t", psi[:-1].conj(), psi[1:])
    bad = np.abs(links) < min_overlap
    if np.any(bad):
        j = int(np.argmax(bad))
        raise EstimatorBreakdown(f"overlap between samples {j} and {j + 1} is {abs(links[j]):.2e}")
    closing = np.vdot(psi[0], psi[-1])
    if abs(closing) < min_overlap:
        raise EstimatorBreakdown(f"endpoint overlap {abs(closing):.2e} is too small")
    return float(wrap_phase(np.angle(closing) - np.sum(np.angle(links))))


# ---------------------------------------------------------------------------
# superpositions of dressed states


@dataclass(frozen=True)
class SuperpositionReport:
    coefficients: np.ndarray
    matched_phase: float | None
    is_gate_realized: bool
    integer_constraints: tuple[tuple[int, int], ...]
    gate_residual: float | None = None

    def __post_init__(self):
        norm = float(np.sum(np.abs(self.coefficients) ** 2))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"expansion coefficients have total weight {norm!r}")


def superposition_gate_check(decomp: DressedDecomposition, psi0,
                             phase_tol: float = PHASE_TOL,
                             amplitude_cutoff: float = AMPLITUDE_CUTOFF) -> SuperpositionReport:
    """Can U(tau) act as G on psi0 up to one global phase?

    Only if every dressed state with non-negligible weight in psi0 carries
    the same eigenphase mod 2 pi. When it does, the gate identity is checked
    directly on psi0 and its residual stored.
    """
    psi0 = as_state(psi0)
    alpha = decomp.dressed_states.conj().T @ psi0
    active = [k for k in range(len(alpha)) if abs(alpha[k]) > amplitude_cutoff]
    phases = decomp.eigenphases[active]
    ref = phases[0]
    realized = bool(np.all(phase_distance(phases, ref) <= phase_tol))
    if not realized:
        return SuperpositionReport(alpha, None, False, ())

    phi = float(wrap_phase(ref + np.mean(wrap_phase(phases - ref))))
    constraints = tuple((k, int(round((phi - decomp.eigenphases[k]) / (2 * np.pi)))) for k in active)
    residual = float(np.linalg.norm(decomp.propagator @ psi0 - np.exp(1j * phi) * decomp.gate @ psi0))
    if residual > 10 * phase_tol:
        realized = False
    return SuperpositionReport(alpha, phi, realized, constraints, residual)


def superposition_beta_closed_form(xi: float, gamma: float, theta0: float, n: int) -> float:
    """Printed closed form for the qubit-gate example at varpi * delta = pi n, wrapped."""
    beta = (np.pi * n + theta0 * np.sin(2 * xi) * np.cos(gamma)
            + np.pi * n * (np.cos(2 * xi) * np.cos(2 * theta0)
                           + np.sin(2 * xi) * np.sin(2 * theta0) * np.sin(gamma)))
    return float(wrap_phase(beta))


def qubit_state(xi: float, gamma: float) -> np.ndarray:
    """cos(xi)|up> + sin(xi) e^{i gamma}|down>."""
    return np.array([np.cos(xi), np.sin(xi) * np.exp(1j * gamma)], dtype=np.complex128)
