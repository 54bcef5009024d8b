"""Acceptance-criteria runner for the simulator.

Each criterion pins one quantitative claim about the model family (steady
concurrence law, closed-form oracle agreement, frozen dark states, sudden
change location, ...) at an explicit tolerance.  The same checks back the
``verify`` CLI subcommand and tests/test_acceptance.py.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import analytic, measures, operators
from .dynamics import MasterEquation, ModelParams, Trajectory, evolve

__all__ = ["CriterionResult", "format_result_line", "run_all", "CRITERIA"]

_DEFAULT_ORACLE_DT = 1e-4


@dataclass
class CriterionResult:
    cid: str
    description: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


def format_result_line(res: CriterionResult) -> str:
    status = "PASS" if res.passed else "FAIL"
    line = (f"{status} {res.cid}: {res.description} "
            f"[measured={res.measured:.3e}, tolerance={res.tolerance:.3e}]")
    if res.detail:
        line += f" ({res.detail})"
    return line


@dataclass
class _RunCache:
    """Memoized trajectories plus hygiene bookkeeping for criterion 11."""

    trajectories: dict = field(default_factory=dict)
    worst_trace_error: float = 0.0
    worst_min_eigenvalue: float = 0.0

    def traj(self, init: str, model: str, eta: float, dt: float,
             t_max: float, stride: int) -> Trajectory:
        key = (init, model, eta, dt, t_max, stride)
        if key not in self.trajectories:
            params = ModelParams(model=model, eta=eta)
            out = evolve(operators.initial_state(init), params, dt=dt,
                         t_max=t_max, stride=stride)
            self.worst_trace_error = max(self.worst_trace_error,
                                         float(out.trace_errors.max()))
            self.worst_min_eigenvalue = min(self.worst_min_eigenvalue,
                                            float(out.min_eigenvalues.min()))
            self.trajectories[key] = out
        return self.trajectories[key]


def _concurrence_series(traj: Trajectory) -> np.ndarray:
    return np.array([measures.concurrence(r) for r in traj.states])


def _gmqd_series(traj: Trajectory, side: int = 1) -> np.ndarray:
    return np.array([measures.gmqd(r, measured_atom=side) for r in traj.states])


def _criterion_1(cache: _RunCache, oracle_dt: float) -> CriterionResult:
    """Steady concurrence 1/(2 - eta) from |ee> and |gg>."""
    tol = 1e-4
    worst = 0.0
    for eta in (0.1, 0.25, 0.5, 0.75, 1.0):
        want = analytic.steady_concurrence(eta)
        for init in ("ee", "gg"):
            traj = cache.traj(init, "feedback_inefficient", eta, 1e-3, 50.0, 1000)
            got = measures.concurrence(traj.states[-1])
            worst = max(worst, abs(got - want))
    return CriterionResult(
        "c1", "steady concurrence equals 1/(2-eta) from |ee> and |gg> at t=50",
        worst < tol, worst, tol)


def _criterion_2(cache: _RunCache, oracle_dt: float) -> CriterionResult:
    """RK4 matches the closed-form solutions entrywise."""
    tol = 1e-7 * (oracle_dt / _DEFAULT_ORACLE_DT) ** 4
    stride = int(round(0.1 / oracle_dt))
    if abs(stride * oracle_dt - 0.1) > 1e-12:
        raise ValueError(f"oracle dt={oracle_dt} must divide the 0.1 checkpoint spacing")
    checkpoints = (0.1, 0.5, 1.0, 2.0, 5.0)
    worst = 0.0
    cases = ([("ee", eta, analytic.ee_closed_form) for eta in (0.1, 0.5, 0.9)]
             + [("gg", eta, analytic.gg_closed_form) for eta in (0.1, 0.5, 0.9, 1.0)])
    for init, eta, closed_form in cases:
        traj = cache.traj(init, "feedback_inefficient", eta, oracle_dt, 5.0, stride)
        for t in checkpoints:
            idx = int(round(t / 0.1))
            want = operators.density_from_sym_x(closed_form(t, eta))
            worst = max(worst, float(np.abs(traj.states[idx] - want).max()))
    return CriterionResult(
        "c2", "RK4 trajectories from |ee> and |gg> match the closed forms entrywise",
        worst < tol, worst, tol, detail=f"dt={oracle_dt:g}")


def _criterion_3(cache: _RunCache, oracle_dt: float, *,
                 feedback_sign_error: bool = False) -> CriterionResult:
    """The singlet is frozen for every detection efficiency."""
    tol = 1e-9
    rho0 = operators.initial_state("eg_minus")
    worst = 0.0
    for eta in (0.1, 0.5, 1.0):
        if feedback_sign_error:
            me = MasterEquation(operators.drive_hamiltonian(0.0),
                                operators.collective_lowering(1.0),
                                feedback=_corrupted_feedback(), eta=eta)
            traj = evolve(rho0, me, dt=1e-3, t_max=10.0, stride=10)
        else:
            traj = cache.traj("eg_minus", "feedback_inefficient", eta, 1e-3, 10.0, 10)
        state_dev = float(np.abs(traj.states - rho0).max())
        conc_dev = float(np.abs(_concurrence_series(traj) - 1.0).max())
        gmqd_dev = float(np.abs(_gmqd_series(traj) - 0.5).max())
        worst = max(worst, state_dev, conc_dev, gmqd_dev)
    return CriterionResult(
        "c3", "singlet state stays frozen (concurrence 1, discord 1/2) for all eta",
        worst < tol, worst, tol)


def _corrupted_feedback() -> np.ndarray:
    # verifier self-check: flip the sign of one cross term, which breaks the
    # singlet invariance while keeping the operator Hermitian
    sx, sz = operators.pauli("x"), operators.pauli("z")
    eye = np.eye(2)
    cross = operators.tensor(sx, sz) - operators.tensor(sz, sx)
    local = operators.tensor(sx, eye) + operators.tensor(eye, sx)
    return -(cross + local)


def _criterion_4(cache: _RunCache, oracle_dt: float) -> CriterionResult:
    """The triplet is a fixed point at perfect detection."""
    tol = 1e-8
    traj = cache.traj("eg_plus", "feedback_inefficient", 1.0, 1e-3, 10.0, 10)
    worst = float(np.abs(_concurrence_series(traj) - 1.0).max())
    return CriterionResult(
        "c4", "triplet state keeps concurrence 1 over [0, 10] at eta = 1",
        worst < tol, worst, tol)


def _criterion_5(cache: _RunCache, oracle_dt: float) -> CriterionResult:
    """Sudden change of concurrence at t = 1/2 from (|ee> - |gg>)/sqrt(2)."""
    tol = 1e-6
    traj = cache.traj("eegg_minus", "feedback_inefficient", 1.0, 1e-3, 10.0, 1)
    series = _concurrence_series(traj)
    want = np.array([analytic.eegg_minus_concurrence(t) for t in traj.times])
    worst = float(np.abs(series - want).max())
    kinks = measures.sudden_change_points(traj.times, series)
    near_half = [t for t in kinks if 0.498 <= t <= 0.502]
    passed = worst < tol and len(near_half) == 1
    return CriterionResult(
        "c5", "concurrence matches the piecewise closed form with one kink at t=0.5",
        passed, worst, tol,
        detail=f"kinks near 0.5: {near_half}; all kinks: {[round(t, 4) for t in kinks]}")


def _criterion_6(cache: _RunCache, oracle_dt: float) -> CriterionResult:
    """Zero-concurrence window grows as detection degrades; bare touch at eta=1."""
    dt = 1e-3
    lengths = []
    for eta in (0.9, 0.7, 0.5, 0.3, 0.1):
        traj = cache.traj("ee", "feedback_inefficient", eta, dt, 10.0, 1)
        windows = measures.esd_windows(traj.times, _concurrence_series(traj))
        lengths.append(sum(e - s for s, e in windows))
    diffs = np.diff(lengths)
    traj1 = cache.traj("ee", "feedback_inefficient", 1.0, dt, 10.0, 1)
    windows1 = measures.esd_windows(traj1.times, _concurrence_series(traj1))
    longest1 = max((e - s for s, e in windows1), default=0.0)
    passed = bool(np.all(diffs > 0)) and longest1 <= 2 * dt + 1e-12
    measured = float(diffs.min()) if len(diffs) else 0.0
    return CriterionResult(
        "c6", "vanishing-window length strictly grows as eta drops; none at eta=1",
        passed, measured, 0.0,
        detail=f"lengths={[round(v, 3) for v in lengths]}, eta=1 longest={longest1:g}")


def _criterion_7(cache: _RunCache, oracle_dt: float) -> CriterionResult:
    """Noise-triggered monotone growth of correlations from |gg>."""
    tol = 1e-4
    slack = 1e-9
    worst = 0.0
    monotone = True
    for eta in (0.1, 0.5, 1.0):
        traj = cache.traj("gg", "feedback_inefficient", eta, 1e-3, 10.0, 10)
        conc = _concurrence_series(traj)
        disc = _gmqd_series(traj)
        monotone &= bool(np.diff(conc).min() > -slack and np.diff(disc).min() > -slack)
        a_inf = (1.0 - eta) / (2.0 - eta)
        want_d = measures.gmqd_sym_x(operators.SymXState(a=a_inf, b=0.0, e=0.0))
        worst = max(worst,
                    abs(conc[-1] - analytic.steady_concurrence(eta)),
                    abs(disc[-1] - want_d))
    return CriterionResult(
        "c7", "from |gg> concurrence and discord grow monotonically to steady values",
        monotone and worst < tol, worst, tol,
        detail=f"monotone={monotone}")


def _criterion_8(cache: _RunCache, oracle_dt: float) -> CriterionResult:
    """|eg>: perfect detection keeps correlations at zero; inefficiency pays."""
    tol = 1e-8
    traj = cache.traj("eg", "feedback_inefficient", 1.0, 1e-3, 10.0, 10)
    worst = max(float(_concurrence_series(traj).max()),
                float(_gmqd_series(traj, side=1).max()),
                float(_gmqd_series(traj, side=2).max()))
    steadies = []
    for eta in (0.1, 0.3, 0.5, 0.7, 0.9):
        traj = cache.traj("eg", "feedback_inefficient", eta, 1e-3, 50.0, 1000)
        steadies.append(measures.concurrence(traj.states[-1]))
    decreasing = bool(np.all(np.diff(steadies) < 0))
    return CriterionResult(
        "c8", "|eg>: zero correlations at eta=1; steady concurrence falls with eta",
        worst < tol and decreasing, worst, tol,
        detail=f"steady concurrence vs eta: {[round(v, 4) for v in steadies]}")


def _criterion_9(cache: _RunCache, oracle_dt: float) -> CriterionResult:
    """Without feedback, |ee> stays separable while discord bumps and dies."""
    tol = 1e-8
    traj = cache.traj("ee", "dicke", 1.0, 1e-3, 50.0, 10)
    conc_max = float(_concurrence_series(traj).max())
    disc = _gmqd_series(traj)
    passed = conc_max < tol and disc.max() > 1e-3 and disc[-1] < 1e-6
    return CriterionResult(
        "c9", "collective decay alone: concurrence stays 0, discord rises then dies",
        passed, conc_max, tol,
        detail=f"discord peak {disc.max():.4f}, final {disc[-1]:.2e}")


def _criterion_10(cache: _RunCache, oracle_dt: float) -> CriterionResult:
    """X-form measure formulas agree with the general constructions."""
    tol = 1e-10
    rng = np.random.default_rng(20250809)
    worst = 0.0
    for _ in range(1000):
        state = measures.sample_sym_x(rng)
        rho = operators.density_from_sym_x(state)
        worst = max(worst,
                    abs(measures.concurrence_sym_x(state) - measures.concurrence(rho)),
                    abs(measures.gmqd_sym_x(state) - measures.gmqd(rho)))
    mismatches = 0
    for _ in range(1000):
        rho = measures.sample_density(rng)
        entangled = measures.concurrence(rho) > 1e-10
        if entangled == measures.ppt_separable(rho):
            mismatches += 1
    passed = worst < tol and mismatches == 0
    return CriterionResult(
        "c10", "X-form concurrence/discord formulas match Wootters/Bloch routes; PPT agrees",
        passed, worst, tol, detail=f"PPT mismatches: {mismatches}/1000")


def _criterion_11(cache: _RunCache, oracle_dt: float) -> CriterionResult:
    """Integrator hygiene and fourth-order convergence."""
    trace_ok = cache.worst_trace_error < 1e-9
    eig_ok = cache.worst_min_eigenvalue > -1e-7

    def oracle_error(dt: float) -> float:
        stride = int(round(0.1 / dt))
        traj = cache.traj("ee", "feedback_inefficient", 0.1, dt, 5.0, stride)
        worst = 0.0
        for t in (0.1, 0.5, 1.0, 2.0, 5.0):
            want = operators.density_from_sym_x(analytic.ee_closed_form(t, 0.1))
            worst = max(worst, float(np.abs(traj.states[int(round(t / 0.1))] - want).max()))
        return worst

    coarse = oracle_error(oracle_dt)
    fine = oracle_error(oracle_dt / 2.0)
    ratio = coarse / fine if fine > 0 else np.inf
    passed = trace_ok and eig_ok and ratio >= 12.0
    return CriterionResult(
        "c11", "trace error < 1e-9, min eigenvalue > -1e-7, 4th-order convergence",
        passed, float(ratio), 12.0,
        detail=(f"worst trace error {cache.worst_trace_error:.2e}, "
                f"worst min eig {cache.worst_min_eigenvalue:.2e}, "
                f"halving dt shrinks oracle error {ratio:.1f}x"))


CRITERIA = {
    "c1": _criterion_1, "c2": _criterion_2, "c3": _criterion_3,
    "c4": _criterion_4, "c5": _criterion_5, "c6": _criterion_6,
    "c7": _criterion_7, "c8": _criterion_8, "c9": _criterion_9,
    "c10": _criterion_10, "c11": _criterion_11,
}


def run_all(criteria: list[str] | None = None, oracle_dt: float = _DEFAULT_ORACLE_DT,
            feedback_sign_error: bool = False) -> list[CriterionResult]:
    """Run the acceptance criteria (all by default) and return their results.

    ``oracle_dt`` overrides the step size of the closed-form comparison
    (criterion 2); its tolerance scales as dt^4.  ``feedback_sign_error``
    corrupts the feedback operator used by the singlet-invariance criterion,
    as a self-check that the verifier can fail.
    """
    selected = list(CRITERIA) if criteria is None else list(criteria)
    unknown = [c for c in selected if c not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown criteria: {unknown}; valid ids are {list(CRITERIA)}")
    cache = _RunCache()
    results = []
    for cid in selected:
        if cid == "c3":
            results.append(_criterion_3(cache, oracle_dt,
                                        feedback_sign_error=feedback_sign_error))
        else:
            results.append(CRITERIA[cid](cache, oracle_dt))
    return results
