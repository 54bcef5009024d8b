"""Command-line front end: scenario runs, figure data export, verification.

Subcommands
-----------
run     integrate one scenario and export the trajectory (CSV or JSON) plus a
        feature report (zero-concurrence windows, kink times, steady values)
figure  export the data files behind the standard figure panels
verify  run the acceptance suite and write a machine-readable report

Exit codes: 0 success, 1 usage error, 2 numeric/integration failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import acceptance, measures, operators
from .dynamics import (IntegrationDivergedError, ModelParams, SteadyStateTimeoutError,
                       Trajectory, evolve)
from .operators import INITIAL_STATE_NAMES, NotSymXFormError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_VERIFY = 3

CSV_HEADER = "t,a,b,c,e,concurrence,gmqd,gmqd_side2,trace_error,min_eigenvalue"

# The CLI refuses eta below this: the feedback-noise dissipator scales as
# 1/eta and stiffens the generator beyond what the default step handles.
MIN_CLI_ETA = 0.01

FIGURE_IDS = ("2a", "2b", "2c", "3", "4a", "4b", "4c", "4d")


class UsageError(ValueError):
    """Invalid configuration; maps to exit code 1."""


@dataclass
class ScenarioConfig:
    """Validated configuration of one trajectory run."""

    initial_state: str = "ee"
    model: str = "feedback_inefficient"
    omega: float = 0.0
    lam: float = 1.0
    mu: float = 1.0
    eta: float = 1.0
    gamma: float = 1.0
    dt: float = 1e-3
    t_max: float = 10.0
    stride: int = 10
    output_path: str = "trajectory.csv"
    fmt: str = "csv"

    def validate(self) -> "ScenarioConfig":
        if self.initial_state not in INITIAL_STATE_NAMES:
            raise UsageError(f"initial_state: unknown state {self.initial_state!r}; "
                             f"expected one of {', '.join(INITIAL_STATE_NAMES)}")
        try:
            self.params()
        except ValueError as exc:
            raise UsageError(f"model parameters: {exc}") from None
        if self.eta < MIN_CLI_ETA:
            raise UsageError(f"eta: must be at least {MIN_CLI_ETA} "
                             "(the feedback-noise term scales as 1/eta)")
        if not (0.0 < self.dt <= 0.1):
            raise UsageError(f"dt: must lie in (0, 0.1], got {self.dt}")
        if not (self.dt <= self.t_max <= 1000.0):
            raise UsageError(f"t_max: must lie in [dt, 1000], got {self.t_max}")
        if self.stride < 1 or int(self.stride) != self.stride:
            raise UsageError(f"stride: must be a positive integer, got {self.stride}")
        if self.fmt not in ("csv", "json"):
            raise UsageError(f"format: must be 'csv' or 'json', got {self.fmt!r}")
        return self

    def params(self) -> ModelParams:
        return ModelParams(model=self.model, omega=self.omega, lam=self.lam,
                           mu=self.mu, eta=self.eta, gamma=self.gamma)


def _fmt(value: float) -> str:
    return "%.12g" % value


def _round12(value: float) -> float:
    return float(_fmt(value))


def _sample_rows(traj: Trajectory) -> list[dict]:
    rows = []
    for k, rho in enumerate(traj.states):
        row = {"t": float(traj.times[k])}
        try:
            state = operators.sym_x_from_density(rho)
            row.update(a=state.a, b=state.b, c=state.c, e=state.e)
        except NotSymXFormError:
            row.update(a=None, b=None, c=None, e=None)
        row["concurrence"] = measures.concurrence(rho)
        row["gmqd"] = measures.gmqd(rho, measured_atom=1)
        row["gmqd_side2"] = measures.gmqd(rho, measured_atom=2)
        row["trace_error"] = float(traj.trace_errors[k])
        row["min_eigenvalue"] = float(traj.min_eigenvalues[k])
        rows.append(row)
    return rows


_COLUMNS = CSV_HEADER.split(",")


def _write_rows(path: Path, rows: list[dict], fmt: str, config: ScenarioConfig) -> None:
    if fmt == "csv":
        lines = [CSV_HEADER]
        for row in rows:
            lines.append(",".join("" if row[col] is None else _fmt(row[col])
                                  for col in _COLUMNS))
        path.write_text("\n".join(lines) + "\n")
    else:
        payload = {
            "config": asdict(config),
            "columns": _COLUMNS,
            "rows": [[None if row[col] is None else _round12(row[col])
                      for col in _COLUMNS] for row in rows],
        }
        path.write_text(json.dumps(payload, indent=1) + "\n")


def run_scenario(config: ScenarioConfig) -> dict[str, Path]:
    """Integrate one scenario; write the trajectory, feature report, sidecar.

    Returns the written paths keyed by role.  Output is deterministic: fixed
    float formatting, no randomness anywhere in the pipeline.
    """
    config.validate()
    traj = evolve(operators.initial_state(config.initial_state), config.params(),
                  dt=config.dt, t_max=config.t_max, stride=config.stride)
    rows = _sample_rows(traj)

    out = Path(config.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_rows(out, rows, config.fmt, config)

    conc = np.array([row["concurrence"] for row in rows])
    disc = np.array([row["gmqd"] for row in rows])
    report = {
        "concurrence": measures.analyze_series(traj.times, conc).as_dict(),
        "gmqd": measures.analyze_series(traj.times, disc).as_dict(),
    }
    features = out.with_suffix(out.suffix + ".features.json")
    features.write_text(json.dumps(report, indent=1, default=_round12) + "\n")

    sidecar = out.with_suffix(out.suffix + ".config.json")
    sidecar.write_text(json.dumps(asdict(config), indent=1) + "\n")
    return {"trajectory": out, "features": features, "config": sidecar}


_FIGURE_STATES = {"2a": "ee", "2b": "gg", "2c": "eg",
                  "4a": "eg_plus", "4b": "eg_minus",
                  "4c": "eegg_plus", "4d": "eegg_minus"}
_FIGURE_CURVES = (("eta1.0", "feedback_inefficient", 1.0),
                  ("eta0.5", "feedback_inefficient", 0.5),
                  ("eta0.1", "feedback_inefficient", 0.1),
                  ("nofeedback", "dicke", 1.0))


def figure(fig_id: str, out_dir: str | Path, t_max: float | None = None) -> list[Path]:
    """Write the data files for one figure panel; returns the written paths."""
    if fig_id not in FIGURE_IDS:
        raise UsageError(f"fig_id: unknown figure {fig_id!r}; expected one of {FIGURE_IDS}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    horizon = 10.0 if t_max is None else t_max
    written: list[Path] = []

    if fig_id == "3":
        for label, model, eta in (("nofeedback", "dicke", 1.0),
                                  ("eta1.0", "feedback_inefficient", 1.0),
                                  ("eta0.5", "feedback_inefficient", 0.5)):
            config = ScenarioConfig(initial_state="ee", model=model, eta=eta,
                                    t_max=horizon,
                                    output_path=str(out_dir / f"fig3_{label}.csv"))
            config.validate()
            traj = evolve(operators.initial_state("ee"), config.params(),
                          dt=config.dt, t_max=config.t_max, stride=config.stride)
            lines = ["t,a,b,e,separable"]
            for k, rho in enumerate(traj.states):
                state = operators.sym_x_from_density(rho)
                sep = int(measures.ppt_separable(rho))
                lines.append(",".join([_fmt(traj.times[k]), _fmt(state.a),
                                       _fmt(state.b), _fmt(state.e), str(sep)]))
            path = Path(config.output_path)
            path.write_text("\n".join(lines) + "\n")
            sidecar = path.with_suffix(path.suffix + ".config.json")
            sidecar.write_text(json.dumps(asdict(config), indent=1) + "\n")
            written += [path, sidecar]
        return written

    init = _FIGURE_STATES[fig_id]
    for label, model, eta in _FIGURE_CURVES:
        config = ScenarioConfig(initial_state=init, model=model, eta=eta,
                                t_max=horizon,
                                output_path=str(out_dir / f"fig{fig_id}_{label}.csv"))
        paths = run_scenario(config)
        written += list(paths.values())
    return written


def verify(report_path: str | Path, criteria: list[str] | None = None,
           oracle_dt: float | None = None, feedback_sign_error: bool = False) -> int:
    """Run the acceptance suite, print one line per criterion, write a report.

    Returns the process exit code (0 when every criterion passes, 3 otherwise).
    """
    kwargs = {}
    if oracle_dt is not None:
        if not (0.0 < oracle_dt <= 0.1):
            raise UsageError(f"dt: must lie in (0, 0.1], got {oracle_dt}")
        kwargs["oracle_dt"] = oracle_dt
    try:
        results = acceptance.run_all(criteria=criteria,
                                     feedback_sign_error=feedback_sign_error, **kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for res in results:
        print(acceptance.format_result_line(res))
    report = {
        "passed": all(r.passed for r in results),
        "criteria": [{"id": r.cid, "description": r.description,
                      "passed": r.passed, "measured": r.measured,
                      "tolerance": r.tolerance, "detail": r.detail}
                     for r in results],
    }
    path = Path(report_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=1) + "\n")
    print(f"report written to {path}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        raise UsageError(message)


_CONFIG_KEYS = {
    "initial_state": ("initial_state", str), "model": ("model", str),
    "omega": ("omega", float), "lambda": ("lam", float), "mu": ("mu", float),
    "eta": ("eta", float), "gamma": ("gamma", float), "dt": ("dt", float),
    "t_max": ("t_max", float), "stride": ("stride", int),
    "format": ("fmt", str), "out": ("output_path", str),
}


def _load_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config: line {lineno} is not 'key = value': {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise UsageError(f"config: unknown key {key!r} on line {lineno}")
        field, cast = _CONFIG_KEYS[key]
        try:
            values[field] = cast(value)
        except ValueError:
            raise UsageError(f"config: bad value for {key!r} on line {lineno}: {value!r}") from None
    return values


def _build_parser() -> _Parser:
    parser = _Parser(prog="atomfb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="integrate one scenario and export it")
    run_p.add_argument("--config", help="flat key=value config file")
    run_p.add_argument("--initial-state", dest="initial_state",
                       choices=INITIAL_STATE_NAMES)
    run_p.add_argument("--model", choices=("dicke", "feedback", "feedback_inefficient"))
    run_p.add_argument("--omega", type=float)
    run_p.add_argument("--lambda", dest="lam", type=float)
    run_p.add_argument("--mu", type=float)
    run_p.add_argument("--eta", type=float)
    run_p.add_argument("--gamma", type=float)
    run_p.add_argument("--dt", type=float)
    run_p.add_argument("--t-max", dest="t_max", type=float)
    run_p.add_argument("--stride", type=int)
    run_p.add_argument("--format", dest="fmt", choices=("csv", "json"))
    run_p.add_argument("--out", dest="output_path")

    fig_p = sub.add_parser("figure", help="export the data behind one figure panel")
    fig_p.add_argument("fig_id", choices=FIGURE_IDS)
    fig_p.add_argument("--out-dir", default="figures")
    fig_p.add_argument("--t-max", dest="t_max", type=float)

    ver_p = sub.add_parser("verify", help="run the acceptance suite")
    ver_p.add_argument("--report", default="verification_report.json")
    ver_p.add_argument("--criteria", help="comma-separated criterion ids (default: all)")
    ver_p.add_argument("--dt", type=float,
                       help="step override for the closed-form comparison; "
                            "its tolerance scales as dt^4")
    ver_p.add_argument("--inject-feedback-sign-error", action="store_true",
                       help="verifier self-check: corrupt the feedback operator "
                            "and expect the singlet criterion to fail")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            base = _load_config_file(args.config) if args.config else {}
            for field in ("initial_state", "model", "omega", "lam", "mu", "eta",
                          "gamma", "dt", "t_max", "stride", "fmt", "output_path"):
                value = getattr(args, field)
                if value is not None:
                    base[field] = value
            paths = run_scenario(ScenarioConfig(**base))
            print(f"trajectory written to {paths['trajectory']}")
            print(f"feature report written to {paths['features']}")
            return EXIT_OK
        if args.command == "figure":
            written = figure(args.fig_id, args.out_dir, t_max=args.t_max)
            print(f"wrote {len(written)} files to {args.out_dir}")
            return EXIT_OK
        if args.command == "verify":
            criteria = args.criteria.split(",") if args.criteria else None
            return verify(args.report, criteria=criteria, oracle_dt=args.dt,
                          feedback_sign_error=args.inject_feedback_sign_error)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationDivergedError, SteadyStateTimeoutError,
            np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
