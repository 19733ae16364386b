"""Retarded propagator of the 1+1-D wave operator and the field it radiates
from the monochromatic source window.

Convention: (c⁻²∂t² - ∂x²) G = -δ(t)δ(x), so G = -(c/2)·θ(c·t - |x|).
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.integrate import quad

from .errors import NumericalError
from .model import CircuitSpec, ExternalModeSpec


def retarded_kernel(dt, dx, c: float = 1.0):
    """-(c/2)·step(c·dt - |dx|); zero outside the future light cone."""
    dt = np.asarray(dt, dtype=float)
    dx = np.asarray(dx, dtype=float)
    out = np.where(c * dt > np.abs(dx), -0.5 * c, 0.0)
    return out if out.ndim else float(out)


def _window_integral_scalar(x: float, kappa: float, half: float):
    if x >= half or x <= -half:
        sign = 1.0 if x >= half else -1.0
        value = cmath.exp(1j * sign * kappa * x) * (2.0 * math.sin(kappa * half) / kappa)
        return value, 1j * sign * kappa * value
    e_plus = cmath.exp(1j * kappa * (x + half))
    e_minus = cmath.exp(1j * kappa * (half - x))
    return (e_plus + e_minus - 2.0) / (1j * kappa), e_plus - e_minus


def _window_integral(x, kappa: float, half: float):
    """∫_{-half}^{half} exp(iκ|x - x'|) dx' and its x-derivative, closed form."""
    if isinstance(x, float):
        return _window_integral_scalar(x, kappa, half)
    x = np.asarray(x, dtype=float)
    outside = 2.0 * math.sin(kappa * half) / kappa
    right = x >= half
    left = x <= -half
    e_plus = np.exp(1j * kappa * (x + half))
    e_minus = np.exp(1j * kappa * (half - x))
    inside = (e_plus + e_minus - 2.0) / (1j * kappa)
    value = np.where(right, np.exp(1j * kappa * x) * outside, np.where(left, np.exp(-1j * kappa * x) * outside, inside))
    slope = np.where(right, 1j * kappa * value, np.where(left, -1j * kappa * value, e_plus - e_minus))
    return value, slope


def _window_integral_quad(x: float, kappa: float, half: float, tol: float) -> complex:
    pieces = [(-half, half)] if abs(x) >= half else [(-half, x), (x, half)]
    total = 0j
    err = 0.0
    for a, b in pieces:
        re, e1 = quad(lambda s: math.cos(kappa * abs(x - s)), a, b, epsabs=tol, epsrel=tol, limit=200)
        im, e2 = quad(lambda s: math.sin(kappa * abs(x - s)), a, b, epsabs=tol, epsrel=tol, limit=200)
        total += re + 1j * im
        err += e1 + e2
    if err > 10 * tol * max(1.0, abs(total)):
        raise NumericalError("source-window quadrature did not converge", achieved=err)
    return total


def _prefactor(mode: ExternalModeSpec, circuit: CircuitSpec) -> complex:
    return -0.5 * circuit.c * math.sqrt(circuit.gamma_C) * mode.phi


def psi_q_frequency_domain(
    t: float,
    x: float,
    mode: ExternalModeSpec,
    circuit: CircuitSpec,
    method: str = "closed",
    tol: float = 1e-12,
):
    """Coefficients (of â, of â†) of the radiated field at (t, x).

    The source is taken as adiabatically switched on, so the time integral of
    the retarded kernel against e^{-iωt'} is e^{-iω(t - |x-x'|/c)}/(-iω); what
    is left is the integral of e^{iω|x-x'|/c} over the source window, done in
    closed form or (``method="quadrature"``) numerically.
    """
    kappa = mode.omega_e / circuit.c
    half = 0.5 * mode.ell
    if method == "closed":
        window = _window_integral_scalar(float(x), kappa, half)[0]
    elif method == "quadrature":
        window = _window_integral_quad(float(x), kappa, half, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    g = _prefactor(mode, circuit) * np.exp(-1j * mode.omega_e * t) * window
    g = complex(g)
    return g, g.conjugate()


def psi_q_gradient(t, x, mode: ExternalModeSpec, circuit: CircuitSpec):
    """Vectorised â-coefficient g(t, x) with its closed-form ∂t and ∂x."""
    kappa = mode.omega_e / circuit.c
    window, slope = _window_integral(x, kappa, 0.5 * mode.ell)
    if isinstance(t, float):
        phase = _prefactor(mode, circuit) * cmath.exp(-1j * mode.omega_e * t)
    else:
        phase = _prefactor(mode, circuit) * np.exp(-1j * mode.omega_e * np.asarray(t, dtype=float))
    g = phase * window
    return g, -1j * mode.omega_e * g, phase * slope


def psi_q_field(t, x, mode: ExternalModeSpec, circuit: CircuitSpec, a: complex):
    """Classical (coherent-limit) field g·a + g*·a* for mode amplitude ``a``."""
    g = psi_q_gradient(t, x, mode, circuit)[0]
    return 2.0 * np.real(g * complex(a))
