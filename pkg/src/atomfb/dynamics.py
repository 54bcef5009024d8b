"""Master-equation assembly and fixed-step RK4 trajectory integration.

Three generators are supported, all with collective decay A through a single
damped channel:

* ``dicke``                  -- drho/dt = -i[H, rho] + D[A]rho
* ``feedback``               -- adds homodyne-current feedback at unit
                                detection efficiency
* ``feedback_inefficient``   -- same, with efficiency eta in (0, 1]; the
                                feedback noise term is enhanced by 1/eta

The feedback terms use the measured-quadrature normalization (A + A^dag)/2,
so the effective control generator is F/2 with F from
:func:`atomfb.operators.feedback_operator`, and the detector phase is the one
for which the control coherently returns the decayed population to the
symmetric triplet state.  This combination is fixed by requiring the
integrator to reproduce the closed-form solutions in :mod:`atomfb.analytic`
(see the acceptance suite).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import operators

__all__ = [
    "MODELS",
    "IntegrationDivergedError",
    "MasterEquation",
    "ModelParams",
    "SteadyStateResult",
    "SteadyStateTimeoutError",
    "Trajectory",
    "dissipator",
    "evolve",
    "rhs",
    "rk4_step",
    "steady_state",
]

MODELS = ("dicke", "feedback", "feedback_inefficient")

# Divergence guard thresholds for evolve().
TRACE_ERROR_LIMIT = 1e-6
MIN_EIGENVALUE_LIMIT = -1e-5


class IntegrationDivergedError(RuntimeError):
    """Raised when a trajectory violates the trace/positivity guards."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class SteadyStateTimeoutError(RuntimeError):
    """Raised when steady_state() fails to converge before t_cap."""

    def __init__(self, message: str, residual: float, time: float):
        super().__init__(message)
        self.residual = residual
        self.time = time


@dataclass(frozen=True)
class ModelParams:
    """Physical and control parameters of one master-equation model.

    omega is the Rabi drive, lam/mu the feedback gain and mixing weight,
    eta the detection efficiency, gamma the collective decay rate (time is
    measured in units of 1/gamma throughout).  lam and mu are ignored for
    the dicke model; eta is ignored unless model == 'feedback_inefficient'.
    """

    model: str
    omega: float = 0.0
    lam: float = 1.0
    mu: float = 1.0
    eta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if not (0.0 < self.eta <= 1.0):
            raise ValueError(f"detection efficiency must be in (0, 1], got {self.eta}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        for field in ("omega", "lam", "mu", "eta", "gamma"):
            if not np.isfinite(getattr(self, field)):
                raise ValueError(f"{field} must be finite")


def dissipator(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Lindblad dissipator D[X]rho = X rho X^dag - (X^dag X rho + rho X^dag X)/2."""
    op_dag = op.conj().T
    op2 = op_dag @ op
    return op @ rho @ op_dag - 0.5 * (op2 @ rho + rho @ op2)


class MasterEquation:
    """Right-hand side of one master equation, precompiled to a superoperator.

    The generator is assembled from explicit 4x4 operator matrices and then
    flattened to a 16x16 matrix acting on vec(rho), which keeps the RK4 inner
    loop to a handful of matrix-vector products.
    """

    def __init__(self, hamiltonian: np.ndarray, jump: np.ndarray,
                 feedback: np.ndarray | None = None, eta: float = 1.0):
        self.hamiltonian = np.asarray(hamiltonian, dtype=complex)
        self.jump = np.asarray(jump, dtype=complex)
        self.feedback = None if feedback is None else np.asarray(feedback, dtype=complex)
        self.eta = float(eta)
        self._liouvillian = self._build_matrix()

    @classmethod
    def from_params(cls, params: ModelParams) -> "MasterEquation":
        return _compiled(params)

    def _apply_direct(self, rho: np.ndarray) -> np.ndarray:
        """Generator applied via the defining operator formula."""
        ham, jump = self.hamiltonian, self.jump
        out = -1j * (ham @ rho - rho @ ham) + dissipator(jump, rho)
        if self.feedback is not None:
            ctrl = 0.5 * self.feedback  # quadrature normalization (A + A^dag)/2
            current = jump @ rho - rho @ jump.conj().T
            out -= ctrl @ current - current @ ctrl
            out += (1.0 / self.eta) * dissipator(ctrl, rho)
        return out

    def _build_matrix(self) -> np.ndarray:
        basis = np.zeros((4, 4), dtype=complex)
        cols = []
        for i in range(4):
            for j in range(4):
                basis[i, j] = 1.0
                cols.append(self._apply_direct(basis).ravel())
                basis[i, j] = 0.0
        return np.column_stack(cols)

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        """Time derivative drho/dt for the given state."""
        rho = np.asarray(rho, dtype=complex)
        return (self._liouvillian @ rho.ravel()).reshape(4, 4)

    def rk4_step(self, rho: np.ndarray, dt: float) -> np.ndarray:
        """One classical fourth-order Runge-Kutta step of size dt.

        The result is re-symmetrized (Hermitian part taken); the trace is
        deliberately not renormalized so that trace drift stays visible as a
        diagnostic.
        """
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt}")
        liou = self._liouvillian
        v = np.asarray(rho, dtype=complex).ravel()
        k1 = liou @ v
        k2 = liou @ (v + (0.5 * dt) * k1)
        k3 = liou @ (v + (0.5 * dt) * k2)
        k4 = liou @ (v + dt * k3)
        out = (v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).reshape(4, 4)
        return 0.5 * (out + out.conj().T)


@lru_cache(maxsize=None)
def _compiled(params: ModelParams) -> MasterEquation:
    ham = operators.drive_hamiltonian(params.omega)
    jump = operators.collective_lowering(params.gamma)
    if params.model == "dicke":
        return MasterEquation(ham, jump)
    feedback = operators.feedback_operator(params.lam, params.mu)
    eta = params.eta if params.model == "feedback_inefficient" else 1.0
    return MasterEquation(ham, jump, feedback=feedback, eta=eta)


def rhs(params: ModelParams, rho: np.ndarray) -> np.ndarray:
    """Time derivative drho/dt under the model selected by ``params``."""
    return MasterEquation.from_params(params).rhs(rho)


def rk4_step(params: ModelParams, rho: np.ndarray, dt: float) -> np.ndarray:
    """One RK4 step under the model selected by ``params``."""
    return MasterEquation.from_params(params).rk4_step(rho, dt)


@dataclass
class Trajectory:
    """Sampled states of one integration run.

    times are uniformly spaced by dt*stride; states[k] is the density matrix
    at times[k]; trace_errors and min_eigenvalues are per-sample diagnostics.
    """

    times: np.ndarray
    states: np.ndarray
    trace_errors: np.ndarray
    min_eigenvalues: np.ndarray

    def __len__(self) -> int:
        return len(self.times)


def evolve(rho0: np.ndarray, params: ModelParams | MasterEquation,
           dt: float, t_max: float, stride: int = 10) -> Trajectory:
    """Integrate rho0 with fixed-step RK4, sampling every ``stride`` steps.

    The number of steps is round(t_max/dt) truncated to a multiple of stride
    so that the sample grid stays uniform.  Raises IntegrationDivergedError
    when the trace error exceeds 1e-6 or the smallest eigenvalue drops below
    -1e-5 at any sample.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_max < dt:
        raise ValueError(f"t_max must be at least dt, got t_max={t_max}, dt={dt}")
    if stride < 1:
        raise ValueError(f"stride must be a positive integer, got {stride}")
    me = params if isinstance(params, MasterEquation) else MasterEquation.from_params(params)
    n_steps = int(round(t_max / dt))
    n_samples = n_steps // stride
    if n_samples < 1:
        raise ValueError("t_max too short for the requested stride")

    rho = np.asarray(rho0, dtype=complex).copy()
    times = dt * stride * np.arange(n_samples + 1)
    states = np.empty((n_samples + 1, 4, 4), dtype=complex)
    trace_errors = np.empty(n_samples + 1)
    min_eigs = np.empty(n_samples + 1)

    def record(k: int) -> None:
        states[k] = rho
        trace_errors[k] = abs(rho.trace().real - 1.0) + abs(rho.trace().imag)
        min_eigs[k] = np.linalg.eigvalsh(rho).min()
        if trace_errors[k] > TRACE_ERROR_LIMIT or min_eigs[k] < MIN_EIGENVALUE_LIMIT:
            raise IntegrationDivergedError(
                f"integration diverged at t={times[k]:.6g}: "
                f"trace error {trace_errors[k]:.3e}, min eigenvalue {min_eigs[k]:.3e}",
                time=float(times[k]))

    record(0)
    for k in range(1, n_samples + 1):
        for _ in range(stride):
            rho = me.rk4_step(rho, dt)
        record(k)
    return Trajectory(times=times, states=states,
                      trace_errors=trace_errors, min_eigenvalues=min_eigs)


@dataclass
class SteadyStateResult:
    """Converged state together with the convergence time and residual."""

    state: np.ndarray
    time: float
    residual: float


def steady_state(rho0: np.ndarray, params: ModelParams | MasterEquation,
                 tol: float = 1e-8, t_cap: float = 200.0,
                 dt: float = 1e-3) -> SteadyStateResult:
    """Integrate until the sup-norm of drho/dt falls below ``tol``.

    Raises SteadyStateTimeoutError carrying the last residual when the
    residual has not dropped below tol by t_cap.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if not t_cap > 0:
        raise ValueError(f"t_cap must be positive, got {t_cap}")
    me = params if isinstance(params, MasterEquation) else MasterEquation.from_params(params)
    rho = np.asarray(rho0, dtype=complex).copy()
    check_every = max(1, int(round(0.1 / dt)))
    t = 0.0
    residual = np.abs(me.rhs(rho)).max()
    if residual < tol:
        return SteadyStateResult(state=rho, time=0.0, residual=float(residual))
    n_steps = int(np.ceil(t_cap / dt))
    for step in range(1, n_steps + 1):
        rho = me.rk4_step(rho, dt)
        t = step * dt
        if step % check_every == 0 or step == n_steps:
            residual = np.abs(me.rhs(rho)).max()
            if residual < tol:
                return SteadyStateResult(state=rho, time=t, residual=float(residual))
    raise SteadyStateTimeoutError(
        f"no steady state by t={t_cap:.6g}: residual {residual:.3e} > tol {tol:.3e}",
        residual=float(residual), time=t)
