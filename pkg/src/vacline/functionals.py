"""Energy, momentum and stress-tensor integrals evaluated by quadrature.

These are deliberately independent of :mod:`vacline.analytic`: they take field
values and derivatives at points and integrate, so agreement with the closed
forms is a real check.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import greens
from .analytic import classical_pulse_gradient
from .errors import NumericalError, PreconditionError
from .model import CircuitSpec, ExternalModeSpec, GaussianPulseSpec

DEFAULT_RTOL = 1e-12

# pulse centre must sit this many widths past the source window
VALIDITY_WIDTHS = 8.0
WINDOW_WIDTHS = 10.0


def default_rtol() -> float:
    value = os.environ.get("VACLINE_TOL")
    if value is None:
        return DEFAULT_RTOL
    tol = float(value)
    if not (math.isfinite(tol) and tol > 0):
        raise ValueError(f"VACLINE_TOL must be a positive number, got {value!r}")
    return tol


@dataclass(frozen=True)
class FieldSampler:
    """Point access to a real field and its first derivatives.

    ``evaluate(t, x)`` returns ``(psi, psi_t, psi_x)`` for scalar ``t`` and
    scalar or array ``x``.  ``support(t)`` gives a finite window outside which
    the field is below ``floor``.
    """

    evaluate: Callable
    support: Callable[[float], tuple[float, float]]
    c: float = 1.0
    floor: float = 0.0

    def __call__(self, t, x):
        return self.evaluate(t, x)


def gaussian_sampler(pulse: GaussianPulseSpec, c: float = 1.0, direction: int = 1) -> FieldSampler:
    """Gaussian pulse moving right (``direction=1``) or left (``-1``)."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    half = WINDOW_WIDTHS * pulse.sigma

    def evaluate(t, x):
        psi, psi_t, psi_x = classical_pulse_gradient(t, direction * np.asarray(x, dtype=float), pulse, c)
        return psi, psi_t, direction * psi_x

    def support(t):
        centre = direction * c * t
        return centre - half, centre + half

    floor = pulse.amplitude * math.exp(-0.5 * WINDOW_WIDTHS**2)
    return FieldSampler(evaluate, support, c=c, floor=floor)


def quad_checked(func, a: float, b: float, rtol: float | None = None, scale: float | None = None) -> float:
    """scipy ``quad`` with a hard failure when the error estimate is too large.

    ``scale`` is a magnitude for the integrand's L1 norm; results smaller than
    ``rtol * scale`` are accepted on an absolute basis.
    """
    rtol = default_rtol() if rtol is None else rtol
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, err = quad(func, a, b, epsabs=0.0, epsrel=rtol, limit=400)
    floor = 1e-13 * scale if scale else 0.0
    if err > max(100 * rtol * abs(value), floor):
        raise NumericalError(f"quadrature on [{a:g}, {b:g}] did not converge", achieved=err)
    return value


def _window(field: FieldSampler, t: float) -> tuple[float, float]:
    lo, hi = field.support(t)
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise PreconditionError(f"field support window [{lo}, {hi}] is not a finite interval")
    return lo, hi


def _integrate(density, field: FieldSampler, t: float, rtol: float | None) -> float:
    lo, hi = _window(field, t)
    xs = np.linspace(lo, hi, 257)
    scale = float(np.sum(np.abs(density(xs))) * (hi - lo) / len(xs))
    if scale == 0.0:
        return 0.0
    return quad_checked(lambda x: float(density(x)), lo, hi, rtol, scale)


def energy(field: FieldSampler, t: float, rtol: float | None = None) -> float:
    """½∫[(∂tψ/c)² + (∂xψ)²] dx over the support window."""

    def density(x):
        _, psi_t, psi_x = field(t, x)
        return 0.5 * ((psi_t / field.c) ** 2 + psi_x**2)

    return _integrate(density, field, t, rtol)


def momentum(field: FieldSampler, t: float, rtol: float | None = None) -> float:
    """-(1/c)∫ ∂tψ ∂xψ dx; equals the energy for a pure right-mover."""

    def density(x):
        _, psi_t, psi_x = field(t, x)
        return -psi_t * psi_x / field.c

    return _integrate(density, field, t, rtol)


def stress_tensor(field: FieldSampler, source, t: float, x) -> np.ndarray:
    """Canonical tensor components [[T^0_0, T^0_1], [T^1_0, T^1_1]] at (t, x).

    Uses x⁰ = c·t; ``source(t, x)`` is the drive f (``None`` for no drive).
    """
    c = field.c
    psi, psi_t, psi_x = field(t, x)
    f = 0.0 if source is None else source(t, x)
    lag = 0.5 * (psi_t / c) ** 2 - 0.5 * psi_x**2 - psi * f
    d0 = psi_t / c
    return np.array(
        [
            [d0 * d0 - lag, d0 * psi_x],
            [-psi_x * d0, -psi_x * psi_x - lag],
        ]
    )


def divergence(field: FieldSampler, source, t: float, x: float, h: float = 1e-3) -> np.ndarray:
    """∂_μ T^μ_ν by central differences with step ``h`` in both t and x."""
    c = field.c
    dt_T = (stress_tensor(field, source, t + h, x) - stress_tensor(field, source, t - h, x)) / (2 * h)
    dx_T = (stress_tensor(field, source, t, x + h) - stress_tensor(field, source, t, x - h)) / (2 * h)
    return dt_T[0] / c + dx_T[1]


def continuity_residual(field: FieldSampler, source, t: float, x: float, h: float = 1e-3) -> np.ndarray:
    """∂_μ T^μ_ν - ψ ∂_ν f; vanishes for fields solving the driven equation."""
    c = field.c
    psi = field(t, x)[0]
    if source is None:
        force = np.zeros(2)
    else:
        f_t = (source(t + h, x) - source(t - h, x)) / (2 * h)
        f_x = (source(t, x + h) - source(t, x - h)) / (2 * h)
        force = psi * np.array([f_t / c, f_x])
    return divergence(field, source, t, x, h) - force


@dataclass(frozen=True)
class OverlapAmplitude:
    """Ĥ_m = mu_H â + h.c. and P̂_m = mu_P â + h.c."""

    mu_H: complex
    mu_P: complex

    @property
    def var_H(self) -> float:
        return abs(self.mu_H) ** 2

    @property
    def var_P(self) -> float:
        return abs(self.mu_P) ** 2


def min_overlap_time(pulse: GaussianPulseSpec, mode: ExternalModeSpec, c: float = 1.0) -> float:
    return (0.5 * mode.ell + VALIDITY_WIDTHS * pulse.sigma) / c


def mixed_overlap_amplitude(
    pulse: GaussianPulseSpec,
    mode: ExternalModeSpec,
    circuit: CircuitSpec,
    t: float | None = None,
    rtol: float | None = None,
) -> OverlapAmplitude:
    """Quadrature of the pulse/field cross terms in H and P.

    Both factors are right-movers once the pulse has cleared the source
    window, so the result does not depend on ``t`` past
    :func:`min_overlap_time`.
    """
    c = circuit.c
    t_min = min_overlap_time(pulse, mode, c)
    if t is None:
        t = t_min + pulse.sigma / c
    elif t <= t_min:
        raise PreconditionError(
            f"pulse overlaps the source window at t={t:g}; need t > {t_min:g}"
        )
    t = float(t)
    if pulse.E0 == 0.0:
        return OverlapAmplitude(0j, 0j)

    lo = c * t - WINDOW_WIDTHS * pulse.sigma
    hi = c * t + WINDOW_WIDTHS * pulse.sigma

    def h_density(x):
        _, pc_t, pc_x = classical_pulse_gradient(t, x, pulse, c)
        _, g_t, g_x = greens.psi_q_gradient(t, x, mode, circuit)
        return pc_t * g_t / c**2 + pc_x * g_x

    def p_density(x):
        _, pc_t, pc_x = classical_pulse_gradient(t, x, pulse, c)
        _, g_t, g_x = greens.psi_q_gradient(t, x, mode, circuit)
        return -(pc_t * g_x + pc_x * g_t) / c

    xs = np.linspace(lo, hi, 401)
    scale = float(np.mean(np.abs(h_density(xs))) * (hi - lo))
    if scale == 0.0:
        return OverlapAmplitude(0j, 0j)

    def integrate(density) -> complex:
        re = quad_checked(lambda x: density(x).real, lo, hi, rtol, scale)
        im = quad_checked(lambda x: density(x).imag, lo, hi, rtol, scale)
        return complex(re, im)

    return OverlapAmplitude(integrate(h_density), integrate(p_density))
