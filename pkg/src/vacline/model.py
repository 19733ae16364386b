"""Validated model parameters, unit handling and configuration parsing.

All physics in this package runs in natural units with ħ = 1.  The wave
speed ``c`` of the line is kept explicit so that a natural-units config with
``gamma_L * gamma_C != 1`` still means something; SI input is rescaled at
parse time so that the internal line speed becomes exactly 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

HBAR_SI = 1.054571817e-34  # J s

DIMENSIONS = (
    "length",
    "time",
    "frequency",
    "energy",
    "energy_squared",
    "flux",
    "inductance_density",
    "capacitance_density",
)

CONFIG_KEYS = (
    "gamma_L",
    "gamma_C",
    "omega_e",
    "phi_re",
    "phi_im",
    "ell",
    "E0",
    "sigma",
    "units",
)

DEFAULTS: dict[str, Any] = {
    "gamma_L": 1.0,
    "gamma_C": 1.0,
    "omega_e": 1.0,
    "phi_re": 1.0,
    "phi_im": 0.0,
    "ell": 1.0,
    "E0": 1.0,
    "sigma": 1.0,
    "units": "natural",
}


class ConfigError(ValueError):
    """Invalid or malformed configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _positive(name: str, value: float) -> float:
    value = _finite(name, value)
    if value <= 0:
        raise ConfigError(name, f"{name} must be positive")
    return value


def _finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(value):
        raise ConfigError(name, f"{name} must be finite")
    return value


@dataclass(frozen=True)
class CircuitSpec:
    """Inductance and capacitance per unit length of the ladder."""

    gamma_L: float
    gamma_C: float

    def __post_init__(self):
        object.__setattr__(self, "gamma_L", _positive("gamma_L", self.gamma_L))
        object.__setattr__(self, "gamma_C", _positive("gamma_C", self.gamma_C))

    @property
    def c(self) -> float:
        return 1.0 / math.sqrt(self.gamma_L * self.gamma_C)


@dataclass(frozen=True)
class ExternalModeSpec:
    """Single external mode: frequency, flux amplitude per unit length, window."""

    omega_e: float
    phi: complex
    ell: float

    def __post_init__(self):
        object.__setattr__(self, "omega_e", _positive("omega_e", self.omega_e))
        object.__setattr__(self, "ell", _positive("ell", self.ell))
        phi = complex(self.phi)
        if not (math.isfinite(phi.real) and math.isfinite(phi.imag)):
            raise ConfigError("phi", "phi must be finite")
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class GaussianPulseSpec:
    E0: float
    sigma: float

    def __post_init__(self):
        E0 = _finite("E0", self.E0)
        if E0 < 0:
            raise ConfigError("E0", "E0 must be non-negative")
        object.__setattr__(self, "E0", E0)
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))

    @property
    def amplitude(self) -> float:
        return math.sqrt(2.0 * self.sigma * self.E0 / math.sqrt(math.pi))


@dataclass(frozen=True)
class UnitsMode:
    """Unit system of the *input/output* numbers.

    ``wave_speed`` is the SI line speed used to fold time into length; it is
    ignored in natural mode.
    """

    mode: str = "natural"
    wave_speed: float = 1.0
    hbar: float = field(init=False)

    def __post_init__(self):
        if self.mode not in ("natural", "SI"):
            raise ConfigError("units", f"unknown units {self.mode!r} (natural or SI)")
        _positive("wave_speed", self.wave_speed)
        object.__setattr__(self, "hbar", HBAR_SI if self.mode == "SI" else 1.0)


def _scale(dimension: str, units: UnitsMode) -> float:
    # natural value = SI value * scale
    c, hbar = units.wave_speed, units.hbar
    scales = {
        "length": 1.0,
        "time": c,
        "frequency": 1.0 / c,
        "energy": 1.0 / (hbar * c),
        "energy_squared": 1.0 / (hbar * c) ** 2,
        "flux": 1.0 / math.sqrt(hbar),
        "inductance_density": c,
        "capacitance_density": c,
    }
    return scales[dimension]


def to_natural(value, dimension: str, units: UnitsMode):
    """Convert ``value`` given in ``units`` to internal natural units."""
    if dimension not in DIMENSIONS:
        raise ValueError(f"unknown dimension {dimension!r}")
    if units.mode == "natural":
        return value
    return value * _scale(dimension, units)


def from_natural(value, dimension: str, units: UnitsMode):
    if dimension not in DIMENSIONS:
        raise ValueError(f"unknown dimension {dimension!r}")
    if units.mode == "natural":
        return value
    return value / _scale(dimension, units)


@dataclass(frozen=True)
class Model:
    """A fully validated parameter set, expressed in natural units."""

    circuit: CircuitSpec
    mode: ExternalModeSpec
    pulse: GaussianPulseSpec
    units: UnitsMode = UnitsMode()

    def replace(self, **overrides) -> "Model":
        """Return a model with raw (input-unit) overrides applied."""
        return validate({**self.raw(), **overrides})

    def raw(self) -> dict[str, Any]:
        """Raw config that re-validates to this model."""
        u = self.units
        phi = from_natural(self.mode.phi, "flux", u)
        return {
            "gamma_L": from_natural(self.circuit.gamma_L, "inductance_density", u),
            "gamma_C": from_natural(self.circuit.gamma_C, "capacitance_density", u),
            "omega_e": from_natural(self.mode.omega_e, "frequency", u),
            "phi_re": phi.real,
            "phi_im": phi.imag,
            "ell": from_natural(self.mode.ell, "length", u),
            "E0": from_natural(self.pulse.E0, "energy", u),
            "sigma": from_natural(self.pulse.sigma, "length", u),
            "units": u.mode,
        }


def validate(raw: Mapping[str, Any]) -> Model:
    """Build a :class:`Model` from a raw key/value mapping.

    Missing keys take the defaults in :data:`DEFAULTS`; unknown keys are
    rejected.  Every failure is a :class:`ConfigError` naming the key.
    """
    for key in raw:
        if key not in CONFIG_KEYS:
            raise ConfigError(key, f"unknown configuration key {key!r}")
    cfg = {**DEFAULTS, **raw}

    units_name = str(cfg["units"]).strip()
    if units_name not in ("natural", "SI"):
        raise ConfigError("units", f"unknown units {units_name!r} (natural or SI)")

    gamma_L = _positive("gamma_L", cfg["gamma_L"])
    gamma_C = _positive("gamma_C", cfg["gamma_C"])
    omega_e = _positive("omega_e", cfg["omega_e"])
    ell = _positive("ell", cfg["ell"])
    sigma = _positive("sigma", cfg["sigma"])
    E0 = _finite("E0", cfg["E0"])
    if E0 < 0:
        raise ConfigError("E0", "E0 must be non-negative")
    phi = complex(_finite("phi_re", cfg["phi_re"]), _finite("phi_im", cfg["phi_im"]))

    if units_name == "SI":
        units = UnitsMode("SI", wave_speed=1.0 / math.sqrt(gamma_L * gamma_C))
    else:
        units = UnitsMode("natural")

    def nat(v, dim):
        return to_natural(v, dim, units)

    return Model(
        circuit=CircuitSpec(nat(gamma_L, "inductance_density"), nat(gamma_C, "capacitance_density")),
        mode=ExternalModeSpec(nat(omega_e, "frequency"), nat(phi, "flux"), nat(ell, "length")),
        pulse=GaussianPulseSpec(nat(E0, "energy"), nat(sigma, "length")),
        units=units,
    )


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse a JSON document or ``key = value`` lines (``#`` comments allowed)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError("<config>", f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("<config>", "JSON config must be an object")
        return data

    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        out[key] = value
    return out


def load_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> Model:
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
        raw.update(parse_config_text(text))
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return validate(raw)
