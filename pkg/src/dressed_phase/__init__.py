"""Dressed-state quantum gates and the geometric phases they carry."""

from .numerics import (Constant, HamiltonianSchedule, Sampled, Trajectory, evolve_exp,
                       hermitian_eig, propagate, unitary_eig, wrap_phase)
from .phases import (DressedDecomposition, PhaseBreakdown, SuperpositionReport, aa_phase,
                     dressed_eigensystem, dressed_hamiltonian, dressed_operator, dynamical_phase,
                     open_path_geometric_phase, superposition_beta_closed_form,
                     superposition_gate_check)

__version__ = "0.1.0"
