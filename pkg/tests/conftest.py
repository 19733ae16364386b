import pytest

from vacline.model import CircuitSpec, ExternalModeSpec, GaussianPulseSpec, validate

# frozen reference values at the unit parameter point (everything = 1)
P1_AMPLITUDE = 1.0622519320271968  # sqrt(2/sqrt(pi))
P1_G = -0.479425538604203  # -sin(1/2)
P1_ALPHA = 6.518343585731214
P1_VARIANCE = 2.3979645956822546


@pytest.fixture
def circuit():
    return CircuitSpec(1.0, 1.0)


@pytest.fixture
def mode():
    return ExternalModeSpec(1.0, 1.0, 1.0)


@pytest.fixture
def pulse():
    return GaussianPulseSpec(1.0, 1.0)


@pytest.fixture
def p1():
    return validate({})
