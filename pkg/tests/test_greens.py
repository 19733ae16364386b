import cmath
import math
import warnings

import numpy as np
import pytest
from conftest import P1_G
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import IntegrationWarning, quad, simpson

from vacline import analytic, greens
from vacline.model import CircuitSpec, ExternalModeSpec


def _fourier_kernel(dt: float, dx: float, eps: float, eta: float = 0.02) -> float:
    """Double Fourier integral of the retarded propagator with damping eps.

    The frequency integral is done numerically for each wavenumber (poles at
    ω = ±k - iε); a Gaussian factor exp(-ηk²) makes the wavenumber integral
    converge and only smooths the light-cone edges over a width ~√η.
    """

    def over_omega(k):
        F = lambda w: 1.0 / ((w + 1j * eps) ** 2 - k * k)
        even = lambda w: (F(w) + F(-w)).real
        odd = lambda w: (F(w) - F(-w)).imag
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            a = quad(even, 0, np.inf, weight="cos", wvar=dt, limlst=100)[0]
            b = quad(odd, 0, np.inf, weight="sin", wvar=dt, limlst=100)[0]
        return (a + b) / (2 * math.pi)

    ks = np.linspace(0.0, 40.0, 1201)
    h = np.array([over_omega(k) for k in ks])
    return simpson(np.cos(ks * dx) * h * np.exp(-eta * ks * ks), x=ks) / math.pi


def test_kernel_inside_light_cone_matches_fourier_oracle():
    eps = np.array([0.2, 0.1, 0.05, 0.025])
    values = [_fourier_kernel(2.0, 1.0, e) for e in eps]
    # Richardson: fit a cubic in eps and read off eps -> 0
    limit = np.linalg.solve(np.vander(eps, 4, increasing=True), values)[0]
    assert limit == pytest.approx(-0.5, abs=1e-4)
    assert greens.retarded_kernel(2.0, 1.0) == -0.5


def test_kernel_outside_light_cone_matches_fourier_oracle():
    assert abs(_fourier_kernel(1.0, 2.0, 0.1)) < 1e-5
    assert greens.retarded_kernel(1.0, 2.0) == 0.0


def test_kernel_vanishes_before_the_source():
    assert greens.retarded_kernel(-1.0, 0.0) == 0.0


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.1, 5))
def test_kernel_is_causal(dt, dx, c):
    value = greens.retarded_kernel(dt, dx, c)
    if c * dt <= abs(dx):
        assert value == 0.0
    else:
        assert value == -0.5 * c


def test_downstream_coefficient(circuit, mode):
    g, gd = greens.psi_q_frequency_domain(0.0, 1.5, mode, circuit)
    assert g == pytest.approx(P1_G * cmath.exp(1.5j), rel=1e-14)
    assert g == pytest.approx(-0.4794255 * cmath.exp(1.5j), rel=1e-7)
    assert gd == g.conjugate()


def test_zero_flux_gives_zero(circuit):
    mode = ExternalModeSpec(1.0, 0.0, 1.0)
    for x in (-3.0, 0.1, 4.0):
        assert greens.psi_q_frequency_domain(0.7, x, mode, circuit) == (0j, 0j)


@pytest.mark.parametrize("x", [-0.6, -1.5, -4.2])
def test_upstream_is_left_moving_with_equal_magnitude(circuit, mode, x):
    t = 0.9
    g, _ = greens.psi_q_frequency_domain(t, x, mode, circuit)
    q, _ = greens.psi_q_frequency_domain(t, x, mode, circuit, method="quadrature")
    assert g == pytest.approx(q, rel=1e-10)
    assert abs(g) == pytest.approx(abs(P1_G), rel=1e-12)
    expected = abs(P1_G) * cmath.exp(-1j * (t + x))
    assert g / expected == pytest.approx(-1.0, rel=1e-12)


@pytest.mark.parametrize("x", [-0.4, -0.1, 0.0, 0.25, 0.49])
def test_inside_window_closed_form_matches_quadrature(circuit, mode, x):
    g, _ = greens.psi_q_frequency_domain(0.3, x, mode, circuit)
    q, _ = greens.psi_q_frequency_domain(0.3, x, mode, circuit, method="quadrature")
    assert g == pytest.approx(q, rel=1e-10)


def test_unknown_method(circuit, mode):
    with pytest.raises(ValueError):
        greens.psi_q_frequency_domain(0.0, 0.0, mode, circuit, method="fft")


@settings(max_examples=40)
@given(st.floats(-20, 20), st.floats(-10, 10), st.floats(0.2, 3), st.floats(0.2, 5))
def test_conjugacy(t, x, w, ell):
    mode = ExternalModeSpec(w, 0.3 + 1.1j, ell)
    g, gd = greens.psi_q_frequency_domain(t, x, mode, CircuitSpec(0.5, 2.0))
    assert gd == g.conjugate()


def test_gradient_matches_finite_differences(circuit, mode):
    h = 1e-5
    for t, x in [(0.2, 2.0), (1.1, 0.2), (-0.5, -1.7)]:
        g, g_t, g_x = greens.psi_q_gradient(t, x, mode, circuit)
        fd_t = (greens.psi_q_gradient(t + h, x, mode, circuit)[0] - greens.psi_q_gradient(t - h, x, mode, circuit)[0]) / (2 * h)
        fd_x = (greens.psi_q_gradient(t, x + h, mode, circuit)[0] - greens.psi_q_gradient(t, x - h, mode, circuit)[0]) / (2 * h)
        assert g_t == pytest.approx(fd_t, rel=1e-6)
        assert g_x == pytest.approx(fd_x, rel=1e-6)


def test_vector_and_scalar_paths_agree(circuit, mode):
    xs = np.linspace(-3, 3, 13)
    vec = greens.psi_q_gradient(0.4, xs, mode, circuit)
    for i, x in enumerate(xs):
        sc = greens.psi_q_gradient(0.4, float(x), mode, circuit)
        for a, b in zip(vec, sc):
            assert a[i] == pytest.approx(b, rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("c", [1.0, 0.5])
@pytest.mark.parametrize("x", [-2.0, -0.3, 0.1, 0.35, 1.7])
def test_wave_operator_residual(c, x):
    circuit = CircuitSpec(1.0 / c**2, 1.0)
    mode = ExternalModeSpec(1.3, 0.6 + 0.8j, 1.0)
    a = 0.7 - 0.2j
    h = 1e-3
    t = 0.37

    def psi(tt, xx):
        return greens.psi_q_field(tt, xx, mode, circuit, a)

    d_tt = (psi(t + h, x) - 2 * psi(t, x) + psi(t - h, x)) / h**2
    d_xx = (psi(t, x + h) - 2 * psi(t, x) + psi(t, x - h)) / h**2
    f = analytic.source_term(t, mode, circuit, a) if abs(x) < 0.5 else 0.0
    f_max = 2 * mode.omega_e * math.sqrt(circuit.gamma_C) * abs(mode.phi * a)
    residual = d_tt / c**2 - d_xx + f
    assert abs(residual) < 1e-6 * f_max
