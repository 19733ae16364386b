"""Parameter sweeps and Δx convergence ladders."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import partial
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import analytic, functionals, lattice
from .errors import NumericalError
from .model import ConfigError, Model

AXES = ("sigma", "omega_e", "ell", "E0", "dx")
SCENARIOS = ("analytic", "quadrature", "lattice", "all")
DISCREPANCY_FLOOR = 1e-30
DEFAULT_DX = 0.02
DEFAULT_CFL = 0.5

COLUMNS = (
    "axis",
    "value",
    "H_c",
    "P_c",
    "alpha",
    "var_analytic",
    "var_quadrature",
    "var_P_quadrature",
    "discrepancy",
    "lattice_A_re",
    "lattice_A_im",
    "lattice_rel_error",
)


@dataclass(frozen=True)
class SweepPlan:
    axis: str
    values: tuple[float, ...]
    scenario: str = "all"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError("--axis", f"unknown axis {self.axis!r}; choose from {', '.join(AXES)}")
        if self.scenario not in SCENARIOS:
            raise ConfigError("--scenario", f"unknown scenario {self.scenario!r}")
        values = tuple(sorted(float(v) for v in self.values))
        if not values:
            raise ConfigError("--points", "sweep needs at least one value")
        for v in values:
            if not math.isfinite(v):
                raise ConfigError(self.axis, "sweep values must be finite")
            if v < 0 or (v == 0 and self.axis != "E0"):
                raise ConfigError(self.axis, f"{self.axis} must be positive, got {v:g}")
        object.__setattr__(self, "values", values)
        if self.axis == "dx" and self.scenario in ("analytic", "quadrature"):
            raise ConfigError("--scenario", "a dx sweep needs the lattice scenario")

    @classmethod
    def linspace(cls, axis: str, lo: float, hi: float, points: int, scenario: str = "all") -> "SweepPlan":
        if points < 1:
            raise ConfigError("--points", "points must be at least 1")
        if not hi >= lo:
            raise ConfigError("--max", "--max must not be below --min")
        return cls(axis, tuple(np.linspace(lo, hi, points)), scenario)


@dataclass(frozen=True)
class ResultRow:
    axis: str
    value: float
    H_c: float
    P_c: float
    alpha: float
    var_analytic: float
    var_quadrature: float | None = None
    var_P_quadrature: float | None = None
    discrepancy: float | None = None
    lattice_A_re: float | None = None
    lattice_A_im: float | None = None
    lattice_rel_error: float | None = None

    def cells(self) -> list[str]:
        out = []
        for name in COLUMNS:
            v = getattr(self, name)
            if v is None:
                out.append("")
            elif isinstance(v, str):
                out.append(v)
            else:
                if not math.isfinite(v):
                    raise NumericalError(f"non-finite {name} in row {self.axis}={self.value:g}")
                out.append(repr(float(v)))
        return out


def evaluate_row(
    model: Model,
    axis: str | None = None,
    value: float | None = None,
    scenario: str = "all",
    dx: float = DEFAULT_DX,
    cfl: float = DEFAULT_CFL,
) -> ResultRow:
    """All derived quantities for ``model`` with ``axis`` set to ``value``."""
    if axis == "dx":
        dx = float(value)
    elif axis is not None:
        model = model.replace(**{axis: value})
    circuit, mode, pulse = model.circuit, model.mode, model.pulse

    var_a = analytic.mixed_variance(pulse, mode, circuit)
    row = dict(
        axis=axis or "",
        value=float(value) if value is not None else 0.0,
        alpha=analytic.alpha(mode, circuit),
        var_analytic=var_a,
    )
    if scenario in ("quadrature", "all"):
        field = functionals.gaussian_sampler(pulse, circuit.c)
        if pulse.E0 == 0:
            row.update(H_c=0.0, P_c=0.0)
        else:
            row.update(H_c=functionals.energy(field, 0.0), P_c=functionals.momentum(field, 0.0))
        amp = functionals.mixed_overlap_amplitude(pulse, mode, circuit)
        row.update(
            var_quadrature=amp.var_H,
            var_P_quadrature=amp.var_P,
            discrepancy=abs(var_a - amp.var_H) / max(var_a, DISCREPANCY_FLOOR),
        )
    else:
        H_c, P_c = analytic.pulse_energy_momentum(pulse)
        row.update(H_c=H_c, P_c=P_c)
    if scenario in ("lattice", "all"):
        res = lattice.run_transmission_experiment(circuit, mode, 1.0, dx=dx, cfl=cfl)
        row.update(
            lattice_A_re=res.amplitude.real,
            lattice_A_im=res.amplitude.imag,
            lattice_rel_error=res.rel_error,
        )
    return ResultRow(**row)


def iter_sweep(
    plan: SweepPlan, model: Model, jobs: int = 1, dx: float = DEFAULT_DX, cfl: float = DEFAULT_CFL
) -> Iterator[ResultRow]:
    """Rows in axis order; evaluation runs on up to ``jobs`` processes."""
    work = partial(_row_worker, model, plan.axis, plan.scenario, dx, cfl)
    if jobs <= 1 or len(plan.values) == 1:
        yield from map(work, plan.values)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(work, plan.values)


def _row_worker(model, axis, scenario, dx, cfl, value):
    return evaluate_row(model, axis, value, scenario, dx, cfl)


def peak_report(rows: Sequence[ResultRow], model: Model) -> dict:
    """Argmax of the analytic variance column against the closed-form peak."""
    values = np.array([r.value for r in rows])
    variances = np.array([r.var_analytic for r in rows])
    i = int(np.argmax(variances))
    expected = analytic.peak_sigma(model.mode, model.circuit.c)
    step = float(np.max(np.diff(values))) if len(values) > 1 else math.inf
    return {
        "argmax_sigma": float(values[i]),
        "peak_sigma": expected,
        "offset": float(values[i] - expected),
        "grid_step": step,
        "within_one_step": abs(values[i] - expected) <= step,
    }


def write_csv(rows: Iterable[ResultRow], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow(row.cells())
        fh.flush()


def rows_to_json(rows: Sequence[ResultRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2)


def csv_text(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


@dataclass(frozen=True)
class ConvergenceReport:
    dx: tuple[float, ...]
    errors: tuple[float, ...]
    pair_orders: tuple[float, ...]
    order: float
    monotone: bool

    @property
    def converged(self) -> bool:
        return self.monotone

    def order_ok(self, lo: float = 1.8, hi: float = 2.2) -> bool:
        return self.monotone and lo <= self.order <= hi and all(lo <= p <= hi for p in self.pair_orders)


def check_ladder(dxs: Sequence[float]) -> tuple[float, ...]:
    dxs = tuple(float(d) for d in dxs)
    if len(dxs) < 3:
        raise ConfigError("--dx", "a convergence ladder needs at least 3 rungs")
    dxs = tuple(sorted(dxs, reverse=True))
    for a, b in zip(dxs, dxs[1:]):
        if not (b > 0 and math.isclose(a / b, 2.0, rel_tol=1e-9)):
            raise ConfigError("--dx", "each rung of the ladder must halve dx")
    return dxs


def converge(model: Model, dxs: Sequence[float] = (0.04, 0.02, 0.01), cfl: float = DEFAULT_CFL) -> ConvergenceReport:
    """Transmitted-amplitude error on a halving Δx ladder and its observed order."""
    dxs = check_ladder(dxs)
    if not (0 < cfl <= lattice.MAX_CFL):
        raise ConfigError("--cfl", f"CFL number must be in (0, {lattice.MAX_CFL}]")
    errors = tuple(
        lattice.run_transmission_experiment(model.circuit, model.mode, 1.0, dx=d, cfl=cfl).rel_error for d in dxs
    )
    monotone = all(e1 > e2 > 0 for e1, e2 in zip(errors, errors[1:]))
    with np.errstate(divide="ignore", invalid="ignore"):
        pairs = tuple(float(np.log2(e1 / e2)) for e1, e2 in zip(errors, errors[1:]))
        slope = float(np.polyfit(np.log(dxs), np.log(errors), 1)[0]) if min(errors) > 0 else float("nan")
    return ConvergenceReport(dxs, errors, pairs, slope, monotone)
