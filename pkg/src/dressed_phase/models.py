"""
Hamiltonians, gates and lattices for the dressed-state examples.

Engineered XY chains act in the single-excitation sector, where the chain is
an N x N tridiagonal matrix equal to J * L_x for spin (N - 1)/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .numerics import (Constant, HamiltonianSchedule, Sampled, evolve_exp, pauli,
                       schedule)

TRANSFER_TOL = 1e-9


class TransferNotFound(RuntimeError):
    pass


@dataclass(frozen=True)
class ChainSpec:
    N: int
    J: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"chain needs N >= 2 sites, got {self.N!r}")
        if not self.J > 0:
            raise ValueError(f"coupling J must be positive, got {self.J!r}")


@dataclass(frozen=True)
class TransferSignature:
    r: complex
    transfer_time: float

    def __post_init__(self):
        if abs(abs(self.r) - 1.0) > TRANSFER_TOL:
            raise ValueError(f"transfer signature must have unit modulus, |r| = {abs(self.r)!r}")
        if not self.transfer_time > 0:
            raise ValueError("transfer time must be positive")


def engineered_couplings(N: int, J: float) -> np.ndarray:
    """Bond strengths J * sqrt(j (N - j)) / 2 for j = 1 .. N-1."""
    j = np.arange(1, N)
    return J * np.sqrt(j * (N - j)) / 2.0


def _tridiagonal(bonds: np.ndarray) -> np.ndarray:
    N = len(bonds) + 1
    H = np.zeros((N, N), dtype=np.complex128)
    idx = np.arange(N - 1)
    H[idx, idx + 1] = bonds
    H[idx + 1, idx] = bonds
    return H


def build_xy_chain(spec: ChainSpec) -> np.ndarray:
    return _tridiagonal(engineered_couplings(spec.N, spec.J))


def _end_to_end_amplitude(evals: np.ndarray, V: np.ndarray, t) -> np.ndarray:
    # <N| exp(-iHt) |1> for an array of times
    w = V[-1, :] * V[0, :].conj()
    return np.exp(-1j * np.outer(np.atleast_1d(t), evals)) @ w


def transfer_signature_of(H: np.ndarray, t_max: float, scan_points: int = 4001,
                          tol: float = TRANSFER_TOL) -> TransferSignature:
    """First time the end-to-end amplitude of a chain matrix reaches modulus one.

    Scans |<N|exp(-iHt)|1>| on a uniform grid over (0, t_max], then refines
    the first near-unit local maximum with a bounded scalar minimization.
    """
    from scipy.optimize import minimize_scalar

    evals, V = np.linalg.eigh(H)
    ts = np.linspace(0.0, t_max, scan_points)
    fid = np.abs(_end_to_end_amplitude(evals, V, ts))
    dt = ts[1] - ts[0]
    for k in range(1, scan_points):
        left = fid[k - 1]
        right = fid[k + 1] if k + 1 < scan_points else -1.0
        if fid[k] < 0.9 or fid[k] < left or fid[k] < right:
            continue
        lo, hi = ts[k] - dt, min(ts[k] + dt, t_max)
        res = minimize_scalar(lambda t: -abs(_end_to_end_amplitude(evals, V, t)[0]),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13})
        t_star = float(res.x)
        amp = complex(_end_to_end_amplitude(evals, V, t_star)[0])
        if abs(abs(amp) - 1.0) <= tol:
            return TransferSignature(amp, t_star)
    raise TransferNotFound(f"no perfect transfer within t <= {t_max:g}")


def measure_transfer_signature(spec: ChainSpec) -> TransferSignature:
    """Measure r = <N|exp(-iHt*)|1> at the first perfect-transfer time t*."""
    return transfer_signature_of(build_xy_chain(spec), 4 * np.pi / spec.J)


def build_chain_swap_gate(spec: ChainSpec) -> np.ndarray:
    """Mirror gate G = conj(r) U(t*), which sends site 1 to site N with unit phase."""
    sig = measure_transfer_signature(spec)
    U = evolve_exp(build_xy_chain(spec), sig.transfer_time)
    return np.conj(sig.r) * U


# ---------------------------------------------------------------------------
# qubit


def build_rotation_gate(theta0: float, axis: str = "x") -> np.ndarray:
    """exp(-i theta0 sigma_axis)."""
    sx, sy, sz = pauli()
    try:
        sigma = {"x": sx, "y": sy, "z": sz}[axis]
    except KeyError:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}") from None
    return np.cos(theta0) * np.eye(2) - 1j * np.sin(theta0) * sigma


@dataclass(frozen=True)
class QubitScheduleSpec:
    """varpi * sigma_z for a time delta, then omega * sigma_x until omega (tau - delta) = theta0."""

    varpi: float
    delta: float
    omega: float
    theta0: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not 0 < self.theta0 < 2 * np.pi:
            raise ValueError("theta0 must lie in (0, 2 pi)")

    @property
    def tau(self) -> float:
        return self.delta + self.theta0 / self.omega


def build_qubit_schedule(spec: QubitScheduleSpec) -> HamiltonianSchedule:
    sx, _, sz = pauli()
    return schedule(Constant(spec.varpi * sz, spec.delta),
                    Constant(spec.omega * sx, spec.theta0 / spec.omega))


# ---------------------------------------------------------------------------
# Lambda system, basis order |0>, |1>, |e>


def lambda_hamiltonian(theta: float, phi: float) -> np.ndarray:
    """|e>(Omega0 <0| + Omega1 <1|) + h.c. with Omega0 = cos(theta/2),
    Omega1 = -sin(theta/2) exp(i phi)."""
    om0 = np.cos(theta / 2)
    om1 = -np.sin(theta / 2) * np.exp(1j * phi)
    H = np.zeros((3, 3), dtype=np.complex128)
    H[2, 0], H[2, 1] = om0, om1
    H[0, 2], H[1, 2] = np.conj(om0), np.conj(om1)
    return H


def dark_state(theta: float, phi: float) -> np.ndarray:
    """cos(theta/2)|0> + sin(theta/2) e^{i phi}|1>, the zero mode of G^dag H G."""
    return np.array([np.cos(theta / 2), np.sin(theta / 2) * np.exp(1j * phi), 0.0],
                    dtype=np.complex128)


def lambda_swap_gate() -> np.ndarray:
    """|1><0| + |0><1| + |e><e|."""
    return np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=np.complex128)


@dataclass(frozen=True)
class LambdaLoopSpec:
    """Ramp theta 0 -> theta_c at phi = 0, sweep phi 0 -> 2 pi, ramp theta back to 0.

    ``fractions`` splits the loop duration between the three legs.
    """

    theta_c: float
    loop_duration: float = 2000.0
    fractions: tuple[float, float, float] = (0.25, 0.5, 0.25)

    def __post_init__(self):
        if not 0 <= self.theta_c <= np.pi:
            raise ValueError("theta_c must lie in [0, pi]")
        if not self.loop_duration > 0:
            raise ValueError("loop duration must be positive")
        if len(self.fractions) != 3 or min(self.fractions) <= 0:
            raise ValueError("fractions must be three positive numbers")

    def legs(self) -> list[tuple[float, callable]]:
        """(duration, path) per leg; path maps local time to (theta, phi)."""
        total = sum(self.fractions)
        d1, d2, d3 = (self.loop_duration * f / total for f in self.fractions)
        tc = self.theta_c
        return [
            (d1, lambda t: (tc * t / d1, 0.0)),
            (d2, lambda t: (tc, 2 * np.pi * t / d2)),
            (d3, lambda t: (tc * (1 - t / d3), 2 * np.pi)),
        ]

    def path(self, t: float) -> tuple[float, float]:
        for d, leg in self.legs():
            if t <= d:
                return leg(t)
            t -= d
        return self.legs()[-1][1](self.legs()[-1][0])


def build_lambda_schedule(spec: LambdaLoopSpec, sample_count: int = 2000) -> HamiltonianSchedule:
    legs = spec.legs()
    start, end = legs[0][1](0.0), legs[-1][1](legs[-1][0])
    if abs(start[0]) > 1e-12 or abs(end[0]) > 1e-12:
        raise ValueError("Lambda loop must start and end at theta = 0")
    return HamiltonianSchedule(tuple(
        Sampled(lambda t, leg=leg: lambda_hamiltonian(*leg(t)), d, sample_count)
        for d, leg in legs))


# ---------------------------------------------------------------------------
# bosonic ring, single-particle sector


class RingModel(Enum):
    INDEPENDENT_ARMS = "independent"
    COUPLED_RING = "coupled"


@dataclass(frozen=True)
class RingSpec:
    N_U: int = 7
    N_L: int = 5
    J: float = 1.0
    model: RingModel = RingModel.INDEPENDENT_ARMS

    def __post_init__(self):
        if self.N_U < 2 or self.N_L < 2:
            raise ValueError("each ring arm needs at least 2 sites")
        if not self.J > 0:
            raise ValueError("coupling J must be positive")

    @property
    def n_sites(self) -> int:
        return self.N_U + self.N_L - 2

    def arm_sites(self, arm: str) -> list[int]:
        """Ring-site indices along one arm from A to B.

        A is site 0, the upper interior follows, B is site N_U - 1, and the
        lower interior takes the remaining indices.
        """
        a, b = 0, self.N_U - 1
        if arm == "upper":
            return list(range(self.N_U))
        if arm == "lower":
            return [a] + list(range(self.N_U, self.N_U + self.N_L - 2)) + [b]
        raise ValueError(f"arm must be 'upper' or 'lower', got {arm!r}")


def build_ring_hamiltonian(spec: RingSpec):
    """Single-particle Bose-Hubbard hopping matrix with engineered couplings.

    Hopping enters as -J_j. INDEPENDENT_ARMS returns the (upper, lower) pair
    of chain matrices; COUPLED_RING returns one matrix on N_U + N_L - 2 sites.
    """
    upper = -_tridiagonal(engineered_couplings(spec.N_U, spec.J))
    lower = -_tridiagonal(engineered_couplings(spec.N_L, spec.J))
    if spec.model is RingModel.INDEPENDENT_ARMS:
        return upper, lower
    H = np.zeros((spec.n_sites, spec.n_sites), dtype=np.complex128)
    for arm, Harm in (("upper", upper), ("lower", lower)):
        sites = spec.arm_sites(arm)
        for i in range(len(sites) - 1):
            a, b = sites[i], sites[i + 1]
            H[a, b] += Harm[i, i + 1]
            H[b, a] += Harm[i + 1, i]
    return H
