"""Closed-form results for the Gaussian test pulse and the transmitted mode."""

from __future__ import annotations

import math

import numpy as np

from .model import CircuitSpec, ExternalModeSpec, GaussianPulseSpec

HBAR = 1.0  # natural units

_SINC_SERIES_CUTOFF = 1e-4


def sinc(u: float) -> float:
    """sin(u)/u, finite at u = 0."""
    if abs(u) < _SINC_SERIES_CUTOFF:
        u2 = u * u
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0
    return math.sin(u) / u


def classical_pulse(t, x, pulse: GaussianPulseSpec, c: float = 1.0):
    """Right-moving Gaussian charge profile sqrt(2σE0/√π)·exp(-(x-ct)²/2σ²)."""
    u = np.asarray(x, dtype=float) - c * np.asarray(t, dtype=float)
    out = pulse.amplitude * np.exp(-(u * u) / (2.0 * pulse.sigma**2))
    return out if out.ndim else float(out)


def classical_pulse_gradient(t, x, pulse: GaussianPulseSpec, c: float = 1.0):
    """(ψ, ∂tψ, ∂xψ) of :func:`classical_pulse`, in closed form."""
    if isinstance(x, float) and isinstance(t, (float, int)):
        u = x - c * t
        psi = pulse.amplitude * math.exp(-(u * u) / (2.0 * pulse.sigma**2))
        dpsi = -u / pulse.sigma**2 * psi
        return psi, -c * dpsi, dpsi
    u = np.asarray(x, dtype=float) - c * np.asarray(t, dtype=float)
    psi = pulse.amplitude * np.exp(-(u * u) / (2.0 * pulse.sigma**2))
    dpsi = -u / pulse.sigma**2 * psi
    return psi, -c * dpsi, dpsi


def pulse_energy_momentum(pulse: GaussianPulseSpec) -> tuple[float, float]:
    return pulse.E0, pulse.E0


def source_term(t, mode: ExternalModeSpec, circuit: CircuitSpec, a: complex):
    """Drive f(t) inside the source window for coherent amplitude ``a``.

    f = -iω√γC(φ a e^{-iωt} - c.c.) = 2ω√γC Im(φ a e^{-iωt}), real by construction.
    """
    z = mode.phi * complex(a) * np.exp(-1j * mode.omega_e * np.asarray(t, dtype=float))
    out = 2.0 * mode.omega_e * math.sqrt(circuit.gamma_C) * np.imag(z)
    return out if np.ndim(out) else float(out)


def transmitted_coefficient(mode: ExternalModeSpec, circuit: CircuitSpec) -> complex:
    """Amplitude g multiplying â·e^{-iω(t - x/c)} downstream of the source window."""
    c = circuit.c
    w = mode.omega_e
    return -(c**2) * math.sqrt(circuit.gamma_C) * math.sin(w * mode.ell / (2 * c)) / w * mode.phi


def alpha(mode: ExternalModeSpec, circuit: CircuitSpec, hbar: float = HBAR) -> float:
    c = circuit.c
    s = sinc(mode.omega_e * mode.ell / (2.0 * c))
    return 4.0 * math.sqrt(math.pi) * s * s * c * mode.ell**2 * circuit.gamma_C * abs(mode.phi) ** 2 / hbar


def mixed_variance(
    pulse: GaussianPulseSpec, mode: ExternalModeSpec, circuit: CircuitSpec, hbar: float = HBAR
) -> float:
    """Vacuum variance of the pulse/field cross term in H (equal for P)."""
    r = mode.omega_e * pulse.sigma / circuit.c
    return hbar * mode.omega_e * pulse.E0 * alpha(mode, circuit, hbar) * r**3 * math.exp(-r * r)


def peak_sigma(mode: ExternalModeSpec, c: float = 1.0) -> float:
    return math.sqrt(1.5) * c / mode.omega_e


def peak_variance_factor() -> float:
    """mixed_variance at the peak in units of ħ ω E0 α."""
    return 1.5**1.5 * math.exp(-1.5)
