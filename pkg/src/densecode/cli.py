"""Command-line entry point: ``densecode {capacity,sweep,threshold,verify,optimize}``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, verify
from .capacity import brute_force_best_encoding, capacity_unital
from .channels import (
    PauliSpec,
    depolarizing_spec,
    one_sided_pauli,
    two_sided_depolarizing,
    two_sided_pauli,
)
from .errors import ConditionViolatedError, DenseCodingError
from .linalg import DensityMatrix
from .qops import bell_density, schmidt_density, werner_state

DIGITS = 12
COMMANDS = ("capacity", "sweep", "threshold", "verify", "optimize")
STATES = ("bell", "werner", "schmidt", "file")
CHANNELS = ("one-sided-pauli", "two-sided-pauli", "one-sided-dep", "two-sided-dep")


class ConfigError(DenseCodingError):
    """Command-line parameters are out of range or inconsistent."""


@dataclass
class RunConfig:
    command: str
    d: int = 2
    p: float = 0.0
    alpha: float = 0.5
    eta: float = 1.0
    state: str = "bell"
    channel: str = "one-sided-dep"
    spec_path: str | None = None
    state_path: str | None = None
    output: str | None = None
    format: str = "json"
    seed: int = 0
    samples: int = 64
    figure: int = 4
    points: int = analysis.DEFAULT_POINTS
    restarts: int = 100
    ensemble_size: int = 4

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not 2 <= self.d <= 8:
            raise ConfigError(f"d must lie in [2, 8], got {self.d}")
        for name in ("p", "alpha", "eta"):
            val = getattr(self, name)
            if not (math.isfinite(val) and 0.0 <= val <= 1.0):
                raise ConfigError(f"{name} must lie in [0, 1], got {val!r}")
        if self.state not in STATES:
            raise ConfigError(f"unknown state {self.state!r}")
        if self.channel not in CHANNELS:
            raise ConfigError(f"unknown channel {self.channel!r}")
        if self.state == "schmidt" and self.d != 2:
            raise ConfigError("the Schmidt family is defined for d = 2")
        if self.state == "file" and not self.state_path:
            raise ConfigError("--state file needs --state-path")
        if self.channel.endswith("pauli") and not self.spec_path:
            raise ConfigError(f"--channel {self.channel} needs --spec-path")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.figure not in (3, 4, 5):
            raise ConfigError(f"figure must be 3, 4 or 5, got {self.figure}")
        if self.points < 2 or self.samples < 0 or self.restarts < 1:
            raise ConfigError("points >= 2, samples >= 0 and restarts >= 1 are required")
        if self.ensemble_size < self.d * self.d:
            raise ConfigError(f"ensemble size must be at least d**2 = {self.d * self.d}")
        return self


def load_state(path: str) -> DensityMatrix:
    """Read ``{"dims": [...], "real": [[...]], "imag": [[...]]}``; ``imag`` is optional."""
    obj = json.loads(Path(path).read_text())
    mat = np.array(obj["real"], dtype=float).astype(complex)
    if "imag" in obj:
        mat = mat + 1j * np.array(obj["imag"], dtype=float)
    return DensityMatrix(mat, tuple(obj["dims"]))


def build_state(cfg: RunConfig) -> DensityMatrix:
    if cfg.state == "bell":
        return bell_density(cfg.d)
    if cfg.state == "werner":
        return werner_state(cfg.d, cfg.eta)
    if cfg.state == "schmidt":
        return schmidt_density(cfg.alpha)
    return load_state(cfg.state_path)


def build_channel(cfg: RunConfig):
    if cfg.channel == "one-sided-dep":
        return one_sided_pauli(depolarizing_spec(cfg.d, cfg.p))
    if cfg.channel == "two-sided-dep":
        return two_sided_depolarizing(cfg.d, cfg.p)
    spec = PauliSpec.from_json(Path(cfg.spec_path).read_text())
    if spec.d != cfg.d:
        raise ConfigError(f"Pauli table has d={spec.d}, but --d is {cfg.d}")
    if cfg.channel == "one-sided-pauli":
        if spec.joint:
            raise ConfigError("one-sided Pauli channels take a single-system table")
        return one_sided_pauli(spec)
    return two_sided_pauli(spec)


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if not math.isfinite(x) else float(f"{x:.{DIGITS}g}")
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _dump(obj) -> str:
    return json.dumps(_num(obj), indent=2) + "\n"


def _rows_csv(header, rows) -> str:
    def cell(v):
        if isinstance(v, float):
            return f"{v:.{DIGITS}g}"
        return str(v)

    lines = [",".join(header)]
    lines += [",".join(cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns ``(exit_status, report_text)``."""
    cfg.validate()
    if cfg.command == "capacity":
        res = capacity_unital(build_state(cfg), build_channel(cfg), samples=cfg.samples, seed=cfg.seed)
        out = res.to_dict()
        if cfg.format == "csv":
            return 0, _rows_csv(list(out), [list(out.values())])
        return 0, _dump(out)

    if cfg.command == "sweep":
        grid = analysis.default_grid(cfg.points)
        sweep = {3: analysis.sweep_figure3, 4: analysis.sweep_figure4, 5: analysis.sweep_figure5}[cfg.figure]
        result = sweep(p_grid=grid)
        if cfg.format == "csv":
            return 0, result.to_csv(DIGITS)
        return 0, _dump(result.to_dict())

    if cfg.command == "threshold":
        reports = {
            "threshold_alpha": analysis.find_threshold_alpha(),
            "classical_limit_crossing": analysis.find_classical_limit_crossing(),
        }
        if cfg.format == "csv":
            rows = [[k, r.root, r.bracket[0], r.bracket[1], r.iterations, r.residual] for k, r in reports.items()]
            return 0, _rows_csv(["name", "root", "lo", "hi", "iterations", "residual"], rows)
        return 0, _dump({k: r.to_dict() for k, r in reports.items()})

    if cfg.command == "verify":
        results = verify.run_all(cfg.seed)
        status = 0 if all(r.passed for r in results) else 1
        if cfg.format == "csv":
            rows = [[r.module, r.name, "pass" if r.passed else "FAIL", r.residual, r.tol] for r in results]
            return status, _rows_csv(["module", "property", "status", "residual", "tol"], rows)
        return status, _dump({"passed": status == 0, "properties": [r.to_dict() for r in results]})

    # optimize
    rho, ch = build_state(cfg), build_channel(cfg)
    rep = brute_force_best_encoding(rho, ch, cfg.ensemble_size, cfg.restarts, cfg.seed)
    out = rep.to_dict()
    try:
        formula = capacity_unital(rho, ch, samples=cfg.samples, seed=cfg.seed).value
        out["formula_bits"] = formula
        out["within_bound"] = bool(rep.best_chi <= formula + 1e-6)
    except ConditionViolatedError as exc:
        out["formula_bits"] = None
        out["condition_residual"] = exc.residual
        out["within_bound"] = None
    status = 0 if out["within_bound"] in (True, None) else 1
    if cfg.format == "csv":
        return status, _rows_csv(list(out), [["" if v is None else v for v in out.values()]])
    return status, _dump(out)


def _seed_default() -> int:
    env = os.environ.get("DENSECODE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"DENSECODE_SEED must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="densecode", description="Super dense coding capacity over noisy unital channels.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--d", type=int, default=2, help="local dimension")
    parser.add_argument("--p", type=float, default=0.0, help="depolarizing noise parameter")
    parser.add_argument("--alpha", type=float, default=0.5, help="Schmidt parameter of the schmidt state")
    parser.add_argument("--eta", type=float, default=1.0, help="Werner weight")
    parser.add_argument("--state", choices=STATES, default="bell")
    parser.add_argument("--state-path", help="JSON density matrix for --state file")
    parser.add_argument("--channel", choices=CHANNELS, default="one-sided-dep")
    parser.add_argument("--spec-path", help="Pauli table JSON for the pauli channels")
    parser.add_argument("--output", "-o", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, default=None, help="random seed (falls back to $DENSECODE_SEED)")
    parser.add_argument("--samples", type=int, default=64, help="Haar samples for the entropy condition")
    parser.add_argument("--figure", type=int, choices=(3, 4, 5), default=4, help="sweep mode")
    parser.add_argument("--points", type=int, default=analysis.DEFAULT_POINTS, help="sweep grid size on [0, 1]")
    parser.add_argument("--restarts", type=int, default=100, help="optimize: random restarts")
    parser.add_argument("--ensemble-size", type=int, default=4, help="optimize: unitaries per ensemble")
    return parser


def _error(exc: Exception, **extra) -> str:
    obj = {"error": type(exc).__name__, "message": str(exc), **extra}
    return json.dumps(_num(obj)) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = vars(args)
    try:
        if opts["seed"] is None:
            opts["seed"] = _seed_default()
        cfg = RunConfig(**opts)
        status, text = run(cfg)
    except ConditionViolatedError as exc:
        sys.stderr.write(_error(exc, residual=exc.residual))
        return 1
    except (DenseCodingError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write(_error(exc))
        return 2
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    if status != 0:
        obj = {"error": "CheckFailed", "message": f"{cfg.command}: one or more checks failed"}
        sys.stderr.write(json.dumps(obj) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
