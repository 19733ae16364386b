"""Moments of observables that are linear in a single bosonic mode."""

from __future__ import annotations

from dataclasses import dataclass

from . import functionals
from .model import CircuitSpec, ExternalModeSpec, GaussianPulseSpec


@dataclass(frozen=True)
class LinearObservable:
    """The hermitian operator c0 + mu·â + mu*·â†."""

    c0: float = 0.0
    mu: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "mu", complex(self.mu))

    def __add__(self, other: "LinearObservable") -> "LinearObservable":
        if not isinstance(other, LinearObservable):
            return NotImplemented
        return LinearObservable(self.c0 + other.c0, self.mu + other.mu)

    def __mul__(self, k: float) -> "LinearObservable":
        return LinearObservable(k * self.c0, k * self.mu)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ModeState:
    """Coherent state |a0⟩; the vacuum is ``ModeState()``."""

    a0: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "a0", complex(self.a0))

    @classmethod
    def vacuum(cls) -> "ModeState":
        return cls()

    @classmethod
    def coherent(cls, a0: complex) -> "ModeState":
        return cls(a0)

    @property
    def kind(self) -> str:
        return "vacuum" if self.a0 == 0 else "coherent"


def mean(obs: LinearObservable, state: ModeState) -> float:
    return obs.c0 + 2.0 * (obs.mu * state.a0).real


def variance(obs: LinearObservable, state: ModeState) -> float:
    # [â, â†] = 1 gives |mu|² in the vacuum; a displacement only shifts the mean
    return abs(obs.mu) ** 2


def mixed_observables(
    pulse: GaussianPulseSpec, mode: ExternalModeSpec, circuit: CircuitSpec, rtol: float | None = None
) -> tuple[LinearObservable, LinearObservable]:
    """(Ĥ_m, P̂_m) as linear observables, from the overlap quadrature."""
    amp = functionals.mixed_overlap_amplitude(pulse, mode, circuit, rtol=rtol)
    return LinearObservable(0.0, amp.mu_H), LinearObservable(0.0, amp.mu_P)


def variance_shift(
    pulse: GaussianPulseSpec,
    mode: ExternalModeSpec,
    circuit: CircuitSpec,
    state: ModeState | None = None,
    rtol: float | None = None,
) -> tuple[float, float]:
    """Pulse-induced increase of the H and P variances above the background."""
    state = ModeState() if state is None else state
    h_m, p_m = mixed_observables(pulse, mode, circuit, rtol)
    return variance(h_m, state), variance(p_m, state)
