"""Simulator for two collectively damped atoms under homodyne-current feedback.

The package integrates the master equation of two identical two-level atoms
whose common cavity channel is monitored by an (imperfect) homodyne detector
feeding back a symmetric control Hamiltonian, and evaluates entanglement
(concurrence) and geometric quantum discord along the trajectories.  Closed
forms for the separable initial states serve as integrator oracles.
"""

from .analytic import (ee_closed_form, eegg_minus_concurrence, gg_closed_form,
                       steady_concurrence)
from .dynamics import (IntegrationDivergedError, MasterEquation, ModelParams,
                       SteadyStateResult, SteadyStateTimeoutError, Trajectory,
                       dissipator, evolve, rhs, rk4_step, steady_state)
from .measures import (BlochForm, FeatureReport, bloch_decompose, concurrence,
                       concurrence_sym_x, esd_windows, gmqd, gmqd_sym_x,
                       partial_transpose, ppt_separable, sudden_change_points)
from .operators import (NotSymXFormError, SymXState, collective_lowering,
                        density_from_sym_x, drive_hamiltonian, feedback_operator,
                        initial_state, pauli, sym_x_from_density, tensor)

__version__ = "0.1.0"

__all__ = [
    "BlochForm", "FeatureReport", "IntegrationDivergedError", "MasterEquation",
    "ModelParams", "NotSymXFormError", "SteadyStateResult",
    "SteadyStateTimeoutError", "SymXState", "Trajectory", "bloch_decompose",
    "collective_lowering", "concurrence", "concurrence_sym_x",
    "density_from_sym_x", "dissipator", "drive_hamiltonian", "ee_closed_form",
    "eegg_minus_concurrence", "esd_windows", "evolve", "feedback_operator",
    "gg_closed_form", "gmqd", "gmqd_sym_x", "initial_state",
    "partial_transpose", "pauli", "ppt_separable", "rhs", "rk4_step",
    "steady_concurrence", "steady_state", "sudden_change_points",
    "sym_x_from_density", "tensor",
]
