import cmath
import math

import numpy as np
import pytest
from conftest import P1_ALPHA, P1_AMPLITUDE, P1_G, P1_VARIANCE
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from vacline import analytic, functionals, greens
from vacline.model import CircuitSpec, ExternalModeSpec, GaussianPulseSpec


def test_pulse_peak_value(pulse):
    assert analytic.classical_pulse(2.0, 2.0, pulse) == pytest.approx(1.0622520, rel=1e-7)
    assert analytic.classical_pulse(0.0, 0.0, pulse) == pytest.approx(P1_AMPLITUDE, rel=1e-15)


def test_zero_energy_pulse_vanishes():
    p = GaussianPulseSpec(0.0, 0.7)
    assert np.all(analytic.classical_pulse(1.3, np.linspace(-5, 5, 11), p) == 0.0)


@given(st.floats(-20, 20), st.floats(-20, 20), st.floats(-5, 5))
def test_pulse_moves_right_at_unit_speed(t, x, shift):
    p = GaussianPulseSpec(1.0, 1.0)
    a = analytic.classical_pulse(t, x, p)
    b = analytic.classical_pulse(t + shift, x + shift, p)
    assert b == pytest.approx(a, rel=1e-9, abs=1e-300)


def test_pulse_gradient_matches_finite_differences(pulse):
    c = 0.7
    h = 1e-5
    for t, x in [(0.3, 0.9), (1.0, -0.4), (2.0, 1.0)]:
        psi, pt, px = analytic.classical_pulse_gradient(t, x, pulse, c)
        fd_t = (analytic.classical_pulse(t + h, x, pulse, c) - analytic.classical_pulse(t - h, x, pulse, c)) / (2 * h)
        fd_x = (analytic.classical_pulse(t, x + h, pulse, c) - analytic.classical_pulse(t, x - h, pulse, c)) / (2 * h)
        assert pt == pytest.approx(fd_t, rel=1e-6)
        assert px == pytest.approx(fd_x, rel=1e-6)


def test_energy_momentum_closed_form():
    assert analytic.pulse_energy_momentum(GaussianPulseSpec(1.0, 1.0)) == (1.0, 1.0)
    assert analytic.pulse_energy_momentum(GaussianPulseSpec(0.0, 1.0)) == (0.0, 0.0)


def test_energy_momentum_agree_with_quadrature():
    p = GaussianPulseSpec(2.5, 0.3)
    H, P = analytic.pulse_energy_momentum(p)
    assert (H, P) == (2.5, 2.5)
    field = functionals.gaussian_sampler(p)
    assert functionals.energy(field, 0.4) == pytest.approx(H, rel=1e-9)
    assert functionals.momentum(field, 0.4) == pytest.approx(P, rel=1e-9)


def test_source_term_values(circuit, mode):
    assert analytic.source_term(0.0, mode, circuit, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert analytic.source_term(math.pi / 2, mode, circuit, 1.0) == pytest.approx(-2.0, rel=1e-14)
    assert np.all(analytic.source_term(np.linspace(0, 9, 7), mode, circuit, 0.0) == 0.0)


@given(st.floats(-50, 50), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_source_term_is_real(t, phi, a):
    mode = ExternalModeSpec(1.3, phi, 1.0)
    out = analytic.source_term(t, mode, CircuitSpec(1.0, 2.0), a)
    assert isinstance(out, float)
    # the same value from the i(z - z*) form
    z = phi * a * cmath.exp(-1.3j * t)
    direct = -1j * 1.3 * math.sqrt(2.0) * (z - z.conjugate())
    assert abs(direct.imag) < 1e-14 * max(1.0, abs(z))
    assert out == pytest.approx(direct.real, rel=1e-12, abs=1e-12)


def test_transmitted_coefficient_values(circuit, mode):
    assert analytic.transmitted_coefficient(mode, circuit) == pytest.approx(P1_G, rel=1e-15)
    assert abs(analytic.transmitted_coefficient(mode, circuit)) == pytest.approx(0.4794255, rel=1e-7)
    zero = ExternalModeSpec(1.0, 1.0, 2 * math.pi)
    assert abs(analytic.transmitted_coefficient(zero, circuit)) < 1e-15


def test_short_window_limit(circuit):
    ell = 1e-3
    mode = ExternalModeSpec(1.0, 1.0, ell)
    g = analytic.transmitted_coefficient(mode, circuit)
    assert g == pytest.approx(-ell / 2, rel=1e-6)
    x = 0.3
    q, _ = greens.psi_q_frequency_domain(0.0, x, mode, circuit, method="quadrature")
    assert q == pytest.approx(g * cmath.exp(1j * x), rel=1e-9)


def test_alpha_values(circuit, mode):
    assert analytic.alpha(mode, circuit) == pytest.approx(P1_ALPHA, rel=1e-14)
    # rounded figure quoted for the unit point
    assert analytic.alpha(mode, circuit) == pytest.approx(6.51829, rel=1e-5)
    assert analytic.alpha(ExternalModeSpec(1.0, 0.0, 1.0), circuit) == 0.0
    zero = analytic.alpha(ExternalModeSpec(1.0, 1.0, 2 * math.pi), circuit)
    assert zero < 1e-30


def test_sinc_series_branch_is_continuous():
    for u in (0.99e-4, 1.01e-4, 1e-8, 0.0):
        assert analytic.sinc(u) == pytest.approx(1 - u * u / 6, rel=1e-15)
    assert analytic.sinc(math.pi) == pytest.approx(0.0, abs=1e-16)


def test_mixed_variance_values(circuit, mode, pulse):
    assert analytic.mixed_variance(pulse, mode, circuit) == pytest.approx(P1_VARIANCE, rel=1e-14)
    assert analytic.mixed_variance(pulse, mode, circuit) == pytest.approx(2.39794, rel=2e-5)
    assert analytic.mixed_variance(GaussianPulseSpec(0.0, 1.0), mode, circuit) == 0.0


def test_mixed_variance_decays_at_large_sigma(circuit, mode):
    values = [analytic.mixed_variance(GaussianPulseSpec(1.0, s), mode, circuit) for s in (2, 4, 8, 16)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-100


def test_peak_sigma_values(mode):
    assert analytic.peak_sigma(mode) == pytest.approx(1.2247449, rel=1e-7)
    assert analytic.peak_sigma(ExternalModeSpec(2.0, 1.0, 1.0)) == pytest.approx(0.6123724, rel=1e-7)
    assert analytic.peak_variance_factor() == pytest.approx(0.409917, rel=2e-6)


def test_peak_matches_numeric_maximiser(circuit):
    for w in (0.5, 1.0, 2.0):
        mode = ExternalModeSpec(w, 1.0, 1.0)
        res = minimize_scalar(
            lambda s: -analytic.mixed_variance(GaussianPulseSpec(1.0, s), mode, circuit),
            bounds=(0.01, 10),
            method="bounded",
            options={"xatol": 1e-10},
        )
        assert res.x == pytest.approx(analytic.peak_sigma(mode), rel=1e-6)
        peak = analytic.mixed_variance(GaussianPulseSpec(1.0, res.x), mode, circuit)
        assert peak == pytest.approx(w * analytic.alpha(mode, circuit) * analytic.peak_variance_factor(), rel=1e-10)


def test_peak_scales_with_wave_speed():
    circuit = CircuitSpec(4.0, 1.0)
    mode = ExternalModeSpec(1.0, 1.0, 1.0)
    assert analytic.peak_sigma(mode, circuit.c) == pytest.approx(0.5 * math.sqrt(1.5))


def test_variance_unimodal_on_grid(circuit, mode):
    sigmas = np.linspace(0.01, 6, 400)
    v = np.array([analytic.mixed_variance(GaussianPulseSpec(1.0, s), mode, circuit) for s in sigmas])
    star = analytic.peak_sigma(mode)
    d = np.diff(v)
    assert np.all(d[sigmas[1:] < star] > 0)
    assert np.all(d[sigmas[:-1] > star] < 0)


@given(st.floats(0, 100), st.floats(0.05, 5))
def test_variance_linear_in_energy(k, sigma):
    circuit, mode = CircuitSpec(1.0, 1.0), ExternalModeSpec(1.0, 1.0, 1.0)
    base = analytic.mixed_variance(GaussianPulseSpec(1.0, sigma), mode, circuit)
    scaled = analytic.mixed_variance(GaussianPulseSpec(k, sigma), mode, circuit)
    assert scaled == pytest.approx(k * base, rel=1e-12, abs=1e-300)


@given(st.floats(0, 2 * math.pi), st.floats(0.1, 3), st.floats(0.1, 5))
def test_only_phi_magnitude_matters(theta, r, ell):
    circuit = CircuitSpec(1.0, 1.5)
    a = ExternalModeSpec(0.8, r, ell)
    b = ExternalModeSpec(0.8, r * cmath.exp(1j * theta), ell)
    p = GaussianPulseSpec(1.0, 1.0)
    assert analytic.alpha(b, circuit) == pytest.approx(analytic.alpha(a, circuit), rel=1e-14)
    assert analytic.mixed_variance(p, b, circuit) == pytest.approx(analytic.mixed_variance(p, a, circuit), rel=1e-14)


@settings(max_examples=50)
@given(
    st.floats(0.2, 3),
    st.floats(0.3, 4),
    st.floats(0.3, 3),
    st.floats(0.01, 10),
    st.floats(-5, 5),
)
def test_transmitted_coefficient_agrees_with_green_function(w, ell, gl, offset, t):
    circuit = CircuitSpec(gl, 1.7)
    mode = ExternalModeSpec(w, 0.4 - 0.9j, ell)
    x = 0.5 * ell + offset
    g, _ = greens.psi_q_frequency_domain(t, x, mode, circuit)
    expected = analytic.transmitted_coefficient(mode, circuit) * cmath.exp(-1j * w * (t - x / circuit.c))
    assert g == pytest.approx(expected, rel=1e-9, abs=1e-15)
