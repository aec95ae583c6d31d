"""Threshold location and figure data for the qubit depolarizing capacities."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .capacity import (
    capacity_alpha,
    capacity_bell_one_sided_dep2,
    capacity_bell_two_sided_dep2,
    classical_dep2_capacity,
    preprocessing_capacity,
)
from .channels import two_sided_depolarizing
from .errors import BracketError
from .qops import bell_density

DEFAULT_POINTS = 201
FIGURE3_ALPHAS = (0.0, 0.08, 0.2, 0.5)

__all__ = [
    "RootReport",
    "SweepResult",
    "bisect",
    "default_grid",
    "find_threshold_alpha",
    "find_classical_limit_crossing",
    "sweep_figure3",
    "sweep_figure4",
    "sweep_figure5",
]


@dataclass(frozen=True)
class RootReport:
    root: float
    bracket: tuple[float, float]
    iterations: int
    residual: float

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "bracket": list(self.bracket),
            "iterations": self.iterations,
            "residual": self.residual,
        }


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-10, max_iter: int = 60) -> RootReport:
    """Bisection on ``[lo, hi]``; stops once the bracket is narrower than ``xtol``."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return RootReport(lo, (lo, lo), 0, 0.0)
    if fhi == 0.0:
        return RootReport(hi, (hi, hi), 0, 0.0)
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(f"f({lo}) = {flo:.6g} and f({hi}) = {fhi:.6g} have the same sign")
    it = 0
    while hi - lo >= xtol and it < max_iter:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        it += 1
        if fm == 0.0:
            lo = hi = mid
            break
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return RootReport(root, (lo, hi), it, abs(f(root)))


def find_threshold_alpha(bracket: tuple[float, float] = (0.2, 0.5)) -> RootReport:
    """Noise level where the Bell and product inputs give equal two-sided capacity."""
    return bisect(lambda p: capacity_alpha(0.5, p) - capacity_alpha(0.0, p), *bracket)


def find_classical_limit_crossing(bracket: tuple[float, float] = (0.1, 0.5)) -> RootReport:
    """Noise level where the one-sided Bell capacity drops to one bit."""
    return bisect(lambda p: capacity_bell_one_sided_dep2(p) - 1.0, *bracket)


@dataclass
class SweepResult:
    """Series of capacities (bits) over a parameter grid."""

    parameter_name: str
    grid: list[float]
    series: dict[str, list[float]] = field(default_factory=dict)

    def __post_init__(self):
        self.grid = [float(x) for x in self.grid]
        n = len(self.grid)
        for name, vals in self.series.items():
            if len(vals) != n:
                raise ValueError(f"series {name!r} has {len(vals)} values for a grid of {n}")
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(f"series {name!r} has non-finite values")

    def column(self, name: str) -> np.ndarray:
        return np.asarray(self.series[name])

    def to_csv(self, digits: int = 12) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        names = list(self.series)
        writer.writerow([self.parameter_name, *names])
        for i, x in enumerate(self.grid):
            writer.writerow([f"{x:.{digits}g}", *(f"{self.series[n][i]:.{digits}g}" for n in names)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepResult":
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], rows[1:]
        grid = [float(r[0]) for r in body]
        series = {name: [float(r[k + 1]) for r in body] for k, name in enumerate(header[1:])}
        return cls(header[0], grid, series)

    def to_dict(self) -> dict:
        return {"parameter_name": self.parameter_name, "grid": list(self.grid), "series": dict(self.series)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SweepResult":
        obj = json.loads(text)
        return cls(obj["parameter_name"], obj["grid"], obj["series"])


def default_grid(points: int = DEFAULT_POINTS) -> list[float]:
    return [float(x) for x in np.linspace(0.0, 1.0, points)]


def _alpha_label(alpha: float) -> str:
    return f"alpha={alpha:g}"


def sweep_figure3(alphas: Sequence[float] = FIGURE3_ALPHAS, p_grid: Sequence[float] | None = None) -> SweepResult:
    """Two-sided qubit depolarizing capacity of ``|phi_alpha>`` for each alpha."""
    grid = default_grid() if p_grid is None else list(p_grid)
    series = {_alpha_label(a): [capacity_alpha(a, p) for p in grid] for a in alphas}
    return SweepResult("p", grid, series)


def sweep_figure4(p_grid: Sequence[float] | None = None) -> SweepResult:
    """One-sided Bell, two-sided Bell and classical capacities, plus the one-bit line."""
    grid = default_grid() if p_grid is None else list(p_grid)
    return SweepResult(
        "p",
        grid,
        {
            "one_sided_bell": [capacity_bell_one_sided_dep2(p) for p in grid],
            "two_sided_bell": [capacity_bell_two_sided_dep2(p) for p in grid],
            "classical": [classical_dep2_capacity(p) for p in grid],
            "classical_limit": [1.0 for _ in grid],
        },
    )


def sweep_figure5(p_grid: Sequence[float] | None = None) -> SweepResult:
    """Bell-state capacity without and with pre-processing, two-sided qubit depolarizing noise."""
    grid = default_grid() if p_grid is None else list(p_grid)
    rho = bell_density(2)
    pre = [preprocessing_capacity(rho, two_sided_depolarizing(2, p)).value for p in grid]
    return SweepResult(
        "p",
        grid,
        {
            "bell_unitary": [capacity_bell_two_sided_dep2(p) for p in grid],
            "bell_preprocessed": pre,
        },
    )
