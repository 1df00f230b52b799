"""
Dense complex linear algebra for small quantum systems.

Hermitian and unitary eigendecompositions, exact exponentials, and
propagation of piecewise time-dependent Hamiltonians (hbar = 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import linalg

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-9
DEGENERACY_TOL = 1e-8


class HermiticityError(ValueError):
    pass


class UnitarityError(ValueError):
    pass


def wrap_phase(x):
    """Map angles onto the principal branch (-pi, pi]."""
    return -np.mod(-np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) + np.pi


def phase_distance(a, b):
    """Distance between two angles on the circle."""
    return np.abs(wrap_phase(np.asarray(a) - np.asarray(b)))


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def as_state(psi, tol: float = 1e-10) -> np.ndarray:
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if v.size < 1:
        raise ValueError("empty state vector")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state not normalized: |psi| = {norm!r}")
    return v


def normalized(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    return v / np.linalg.norm(v)


def hermiticity_defect(H: np.ndarray) -> float:
    return float(np.max(np.abs(H - H.conj().T)))


def unitarity_defect(U: np.ndarray) -> float:
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def check_hermitian(H, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return H as a complex array, raising if it is not Hermitian.

    The tolerance is absolute for matrices of order-one entries and scales
    with the largest entry otherwise.
    """
    H = as_matrix(H)
    defect = hermiticity_defect(H)
    scale = max(1.0, float(np.max(np.abs(H))))
    if defect > tol * scale:
        raise HermiticityError(f"matrix is not Hermitian: max |H - H^dag| = {defect:.3e}")
    return H


def check_unitary(U, tol: float = UNITARY_TOL) -> np.ndarray:
    U = as_matrix(U)
    defect = unitarity_defect(U)
    if defect > tol:
        raise UnitarityError(f"matrix is not unitary: max |U^dag U - I| = {defect:.3e}")
    return U


def hermitian_eig(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of H."""
    H = check_hermitian(H)
    evals, evecs = np.linalg.eigh(0.5 * (H + H.conj().T))
    return evals, evecs


def evolve_exp(H, t: float) -> np.ndarray:
    """exp(-i H t) via the eigendecomposition of H."""
    evals, V = hermitian_eig(H)
    return (V * np.exp(-1j * evals * t)) @ V.conj().T


def _group_phases(phases: np.ndarray, tol: float) -> list[list[int]]:
    # single linkage on the circle; phases are sorted ascending
    n = len(phases)
    if n == 1:
        return [[0]]
    gaps = phase_distance(phases, np.roll(phases, -1))  # gap i: between i and i+1 (cyclic)
    breaks = [i for i in range(n) if gaps[i] > tol]
    if not breaks:
        return [list(range(n))]
    groups = []
    start = (breaks[-1] + 1) % n
    for b in breaks:
        idx = []
        i = start
        while True:
            idx.append(i)
            if i == b:
                break
            i = (i + 1) % n
        groups.append(idx)
        start = (b + 1) % n
    return groups


def _circular_mean(phases: np.ndarray) -> float:
    ref = phases[0]
    return float(wrap_phase(ref + np.mean(wrap_phase(phases - ref))))


def _sort_key(phase: float, vec: np.ndarray) -> tuple:
    return (round(float(phase), 12), *np.round(vec.real, 12).tolist())


def unitary_eig(W, tol: float = UNITARY_TOL,
                degeneracy_tol: float = DEGENERACY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases in (-pi, pi] and orthonormal eigenvectors of a unitary.

    Uses the complex Schur form, which is diagonal for normal matrices and
    yields an orthonormal basis even inside degenerate eigenspaces. Phases
    within ``degeneracy_tol`` of each other are treated as one eigenspace:
    they share a single representative phase and the basis of that space is
    re-orthonormalized.
    """
    W = check_unitary(W, tol)
    T, Z = linalg.schur(W, output="complex")
    phases = wrap_phase(np.angle(np.diag(T)))
    order = np.argsort(phases, kind="stable")
    phases, Z = phases[order], Z[:, order]

    out_phases = np.empty_like(phases)
    out_vecs = np.empty_like(Z)
    for group in _group_phases(phases, degeneracy_tol):
        rep = _circular_mean(phases[group])
        block = Z[:, group]
        if len(group) > 1:
            block, _ = np.linalg.qr(block)
        for j, col in zip(group, block.T):
            out_phases[j] = rep
            out_vecs[:, j] = col

    # fix each vector's gauge so its largest entry is real and positive
    for k in range(out_vecs.shape[1]):
        v = out_vecs[:, k]
        i = int(np.argmax(np.abs(v) > np.max(np.abs(v)) - 1e-12))
        out_vecs[:, k] = v * np.exp(-1j * np.angle(v[i]))

    keys = [_sort_key(out_phases[k], out_vecs[:, k]) for k in range(len(out_phases))]
    order = sorted(range(len(keys)), key=keys.__getitem__)
    return out_phases[order], out_vecs[:, order]


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class Constant:
    """A time-independent Hamiltonian applied for ``duration``."""

    matrix: np.ndarray
    duration: float

    def __post_init__(self):
        object.__setattr__(self, "matrix", check_hermitian(self.matrix))
        if not self.duration > 0:
            raise ValueError(f"segment duration must be positive, got {self.duration!r}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def hamiltonian(self, t: float) -> np.ndarray:
        return self.matrix


@dataclass(frozen=True)
class Sampled:
    """A Hamiltonian given as a function of segment-local time in [0, duration].

    ``sample_count`` is the number of midpoint-exponential steps; when None
    the caller's samples-per-segment is used.
    """

    generator: Callable[[float], np.ndarray]
    duration: float
    sample_count: int | None = None
    dim: int = field(init=False)

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"segment duration must be positive, got {self.duration!r}")
        if self.sample_count is not None and self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        object.__setattr__(self, "dim", self.hamiltonian(0.0).shape[0])

    def hamiltonian(self, t: float) -> np.ndarray:
        return check_hermitian(self.generator(t))


Segment = Union[Constant, Sampled]


@dataclass(frozen=True)
class HamiltonianSchedule:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("schedule needs at least one segment")
        dims = {s.dim for s in segs}
        if len(dims) != 1:
            raise ValueError(f"segments have mismatched dimensions {sorted(dims)}")
        object.__setattr__(self, "segments", segs)

    @property
    def dim(self) -> int:
        return self.segments[0].dim

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    def scaled(self, c: float) -> "HamiltonianSchedule":
        """The same evolution run c times faster: H -> c H(c t), durations / c."""
        out = []
        for s in self.segments:
            if isinstance(s, Constant):
                out.append(Constant(c * s.matrix, s.duration / c))
            else:
                gen = s.generator
                out.append(Sampled(lambda t, gen=gen: c * np.asarray(gen(c * t)),
                                   s.duration / c, s.sample_count))
        return HamiltonianSchedule(tuple(out))

    def conjugated(self, G) -> "HamiltonianSchedule":
        """Schedule of G^dag H(t) G, segment by segment."""
        G = as_matrix(G)
        Gd = G.conj().T
        out = []
        for s in self.segments:
            if isinstance(s, Constant):
                M = Gd @ s.matrix @ G
                out.append(Constant(0.5 * (M + M.conj().T), s.duration))
            else:
                gen = s.generator
                out.append(Sampled(lambda t, gen=gen: Gd @ np.asarray(gen(t)) @ G,
                                   s.duration, s.sample_count))
        return HamiltonianSchedule(tuple(out))


def schedule(*segments: Segment) -> HamiltonianSchedule:
    return HamiltonianSchedule(tuple(segments))


# ---------------------------------------------------------------------------
# propagation


@dataclass(frozen=True)
class SegmentSamples:
    """Propagators and Hamiltonians sampled on one segment's time grid.

    ``propagators[j]`` is the cumulative U(t0 + local_times[j]) from t = 0.
    """

    t0: float
    local_times: np.ndarray
    propagators: np.ndarray
    hamiltonians: np.ndarray


@dataclass(frozen=True)
class OperatorTrajectory:
    segments: tuple[SegmentSamples, ...]

    @property
    def final(self) -> np.ndarray:
        return self.segments[-1].propagators[-1]

    def times(self) -> np.ndarray:
        parts = [self.segments[0].t0 + self.segments[0].local_times]
        for s in self.segments[1:]:
            parts.append(s.t0 + s.local_times[1:])
        return np.concatenate(parts)

    def propagators(self) -> np.ndarray:
        parts = [self.segments[0].propagators]
        parts += [s.propagators[1:] for s in self.segments[1:]]
        return np.concatenate(parts)


def _constant_samples(seg: Constant, n: int, t0: float, U0: np.ndarray) -> SegmentSamples:
    evals, V = hermitian_eig(seg.matrix)
    ts = np.linspace(0.0, seg.duration, n + 1)
    phases = np.exp(-1j * np.outer(ts, evals))
    Us = np.einsum("ik,tk,jk->tij", V, phases, V.conj()) @ U0
    Hs = np.broadcast_to(seg.matrix, (n + 1,) + seg.matrix.shape)
    return SegmentSamples(t0, ts, Us, Hs)


def _sampled_samples(seg: Sampled, n: int, t0: float, U0: np.ndarray,
                     keep_steps: bool) -> tuple[SegmentSamples, list[np.ndarray]]:
    ts = np.linspace(0.0, seg.duration, n + 1)
    d = U0.shape[0]
    Us = np.empty((n + 1, d, d), dtype=np.complex128)
    Hs = np.empty((n + 1, d, d), dtype=np.complex128)
    Us[0] = U0
    steps = []
    for j in range(n):
        dt = ts[j + 1] - ts[j]
        step = evolve_exp(seg.hamiltonian(0.5 * (ts[j] + ts[j + 1])), dt)
        if keep_steps:
            steps.append(step)
        Us[j + 1] = step @ Us[j]
    for j in range(n + 1):
        Hs[j] = seg.hamiltonian(ts[j])
    return SegmentSamples(t0, ts, Us, Hs), steps


def operator_trajectory(sched: HamiltonianSchedule, samples_per_segment: int,
                        keep_steps: bool = False):
    """Cumulative propagators on every segment's sample grid.

    Constant segments are exponentiated exactly at each sample time;
    Sampled segments are stepped with the midpoint exponential
    exp(-i H(t_mid) dt). Returns the trajectory and, if requested, the list
    of per-step unitaries (exact sample-to-sample steps for Constant segments).
    """
    if samples_per_segment < 1:
        raise ValueError("samples_per_segment must be >= 1")
    d = sched.dim
    U = np.eye(d, dtype=np.complex128)
    t0 = 0.0
    out = []
    steps: list[np.ndarray] = []
    for seg in sched.segments:
        if isinstance(seg, Constant):
            s = _constant_samples(seg, samples_per_segment, t0, U)
            if keep_steps:
                ts = s.local_times
                steps.extend(evolve_exp(seg.matrix, ts[j + 1] - ts[j]) for j in range(len(ts) - 1))
        else:
            n = seg.sample_count or samples_per_segment
            s, seg_steps = _sampled_samples(seg, n, t0, U, keep_steps)
            steps.extend(seg_steps)
        out.append(s)
        U = s.propagators[-1]
        t0 += seg.duration
    return OperatorTrajectory(tuple(out)), (steps if keep_steps else None)


@dataclass(frozen=True)
class Trajectory:
    """A sampled path |psi(t)>, t from 0 to tau.

    ``segment_bounds[k]`` is the (first, last) index into ``times`` covered by
    segment k; neighbouring segments share their boundary sample.
    """

    times: np.ndarray
    states: np.ndarray
    segment_bounds: tuple[tuple[int, int], ...] = ()
    step_propagators: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) < 2:
            raise ValueError("trajectory needs at least two samples")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("trajectory times must start at 0 and increase strictly")
        norms = np.linalg.norm(self.states, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ValueError(f"trajectory norm drift {np.max(np.abs(norms - 1.0)):.3e}")

    @property
    def duration(self) -> float:
        return float(self.times[-1])


def propagate(sched: HamiltonianSchedule, psi0, samples_per_segment: int = 2000,
              keep_steps: bool = False) -> tuple[np.ndarray, Trajectory]:
    """Evolve psi0 through the schedule; return (U(tau), trajectory)."""
    psi0 = as_state(psi0)
    if psi0.shape[0] != sched.dim:
        raise ValueError(f"state dimension {psi0.shape[0]} does not match schedule dimension {sched.dim}")
    ops, steps = operator_trajectory(sched, samples_per_segment, keep_steps)
    times = ops.times()
    states = ops.propagators() @ psi0
    bounds = []
    start = 0
    for s in ops.segments:
        stop = start + len(s.local_times) - 1
        bounds.append((start, stop))
        start = stop
    traj = Trajectory(times, states, tuple(bounds),
                      tuple(steps) if steps is not None else None)
    return ops.final, traj


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def pauli() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    sx = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    sy = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    sz = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return sx, sy, sz


def max_abs(a: Sequence | np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a))))
