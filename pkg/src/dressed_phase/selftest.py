"""
Invariant suite and acceptance matrix, runnable from the command line.
"""

from __future__ import annotations

import numpy as np

from . import scenarios
from .models import QubitScheduleSpec, build_qubit_schedule, build_rotation_gate
from .numerics import (Constant, HamiltonianSchedule, Sampled, phase_distance, propagate,
                       random_hermitian, random_unitary, unitarity_defect)
from .phases import aa_phase, dressed_eigensystem, dynamical_phase, superposition_gate_check
from .scenarios import Check, ScenarioReport


def random_schedule(dim: int, rng: np.random.Generator) -> HamiltonianSchedule:
    """One to three constant segments plus one smoothly driven segment."""
    segs = [Constant(random_hermitian(dim, rng), float(rng.uniform(0.1, 1.5)))
            for _ in range(int(rng.integers(1, 4)))]
    A, B = random_hermitian(dim, rng), random_hermitian(dim, rng)
    w = float(rng.uniform(0.5, 3.0))
    segs.append(Sampled(lambda t, A=A, B=B, w=w: A + np.sin(w * t) * B,
                        float(rng.uniform(0.1, 1.5)), 16))
    return HamiltonianSchedule(tuple(segs))


def gate_realization(seed: int, trials: int = 200) -> dict[str, float]:
    """Worst residuals of the dressed-state identities over random (G, schedule) pairs."""
    rng = np.random.default_rng(seed)
    worst = {"gate": 0.0, "eigen": 0.0, "unitarity": 0.0}
    for _ in range(trials):
        dim = int(rng.integers(2, 9))
        G = random_unitary(dim, rng)
        U, _ = propagate(random_schedule(dim, rng), np.eye(dim)[0], 1)
        dec = dressed_eigensystem(G, U)
        worst["gate"] = max(worst["gate"], dec.gate_residual())
        worst["eigen"] = max(worst["eigen"], dec.eigen_residual())
        worst["unitarity"] = max(worst["unitarity"], unitarity_defect(U))
    return worst


def qubit_phases(sched: HamiltonianSchedule, G: np.ndarray, psi0: np.ndarray) -> tuple[float, float, float]:
    U, _ = propagate(sched, psi0, 1)
    sup = superposition_gate_check(dressed_eigensystem(G, U), psi0)
    D = dynamical_phase(G, sched, psi0, 400)
    return sup.matched_phase, D, aa_phase(sup.matched_phase, D)


def reparameterization_gap() -> float:
    """Largest change of (phi, D, beta) when the qubit schedule runs c times faster."""
    G = build_rotation_gate(1.0)
    sched = build_qubit_schedule(QubitScheduleSpec(1.3, 0.7, 0.9, 1.0))
    psi0 = np.array([1.0, 0.0], dtype=np.complex128)
    base = qubit_phases(sched, G, psi0)
    gap = 0.0
    for c in (2.0, 10.0):
        fast = qubit_phases(sched.scaled(c), G, psi0)
        gap = max(gap, float(phase_distance(base[0], fast[0])), abs(base[1] - fast[1]),
                  float(phase_distance(base[2], fast[2])))
    return gap


def dark_state_runs(theta_c: float, durations=(2000.0, 4000.0)):
    """Reports and adiabatic-phase errors against -2 pi sin^2(theta_c / 2)."""
    reps = [scenarios.scenario_dark_state_loop(theta_c, T) for T in durations]
    oracle = -2 * np.pi * np.sin(theta_c / 2) ** 2
    return reps, [float(phase_distance(r.adiabatic_phase, oracle)) for r in reps]


def run_selftest(seed: int = 0, tolerance_scale: float = 1.0) -> ScenarioReport:
    s = tolerance_scale
    checks: list[Check] = []

    worst = gate_realization(seed)
    checks += [
        Check.at_most("random_gate_realization", worst["gate"], 1e-9 * s),
        Check.at_most("random_eigen_residual", worst["eigen"], 1e-9 * s),
        Check.at_most("random_unitarity", worst["unitarity"], 1e-10 * s),
        Check.at_most("reparameterization_invariance", reparameterization_gap(), 1e-8 * s),
    ]

    cyc = scenarios.scenario_pst_cycle(4)
    checks.append(Check.phase("estimator_consistency_N4", cyc.outputs["beta"],
                              cyc.outputs["open_path_beta"], 5e-3 * s))
    for N in (3, 4, 5, 6, 7, 8):
        rep = scenarios.scenario_pst_cycle(N)
        e = rep.outputs["e_i_beta_re"] + 1j * rep.outputs["e_i_beta_im"]
        checks.append(Check.at_most(f"pst_cycle_N{N}", abs(e - (-1) ** (N - 1)), 1e-8 * s))
    for N in range(2, 9):
        rep = scenarios.scenario_pst_transfer(N)
        o = rep.outputs
        e = o["e_i_beta_re"] + 1j * o["e_i_beta_im"]
        r = o["r_re"] + 1j * o["r_im"]
        checks.append(Check.at_most(f"pst_transfer_N{N}", abs(e - r), 1e-8 * s))
    for vd in (np.pi / 6, np.pi / 3, 1.0, 2.0):
        for th in (np.pi / 8, np.pi / 4, 1.0):
            rep = scenarios.scenario_qubit_gate(vd, th)
            c2 = np.cos(2 * th)
            gap = max(abs(rep.outputs["dynamical_phase_up"] - vd * c2),
                      float(phase_distance(rep.outputs["beta_up"], -vd * (1 - c2))),
                      abs(rep.outputs["dynamical_phase_down"] + vd * c2),
                      float(phase_distance(rep.outputs["beta_down"], vd * (1 - c2))))
            checks.append(Check.at_most(f"qubit_gate_{vd:.4f}_{th:.4f}", gap, 1e-8 * s))
    for n in (1, 2):
        rep, _ = scenarios.scenario_superposition_surface(9, 9, 1.0, n)
        checks.append(Check.at_most(f"surface_u_tau_n{n}", rep.outputs["u_tau_residual"], 1e-9 * s))
        checks.append(Check.at_most(f"surface_lines_n{n}",
                                    rep.outputs["max_discrepancy_on_sin_gamma_zero"], 1e-6 * s))
    for tc in (np.pi / 4, np.pi / 2):
        reps, errs = dark_state_runs(tc)
        checks.append(Check.at_most(f"dark_dynamical_{tc:.4f}", abs(reps[0].dynamical_residual), 1e-9 * s))
        checks.append(Check.at_most(f"dark_adiabatic_{tc:.4f}", errs[0], 5e-2 * s))
        checks.append(Check.at_least(f"dark_refinement_{tc:.4f}", errs[0] - errs[1], 0.0))
    for nu, nl, want in ((7, 5, 0.0), (5, 5, 4.0), (6, 5, 2.0)):
        ring = scenarios.scenario_boson_ring(nu, nl, coupled=False)
        checks.append(Check.close(f"boson_ring_{nu}_{nl}", want, ring.intensity_factor, 1e-9 * s))

    summary = {"passed": all(c.passed for c in checks), "n_checks": len(checks),
               "n_failed": sum(not c.passed for c in checks)}
    return ScenarioReport("selftest", {"seed": seed}, summary, tuple(checks))
