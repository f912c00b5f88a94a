import pytest

from vdw.polarizability import load_molecule
from vdw.schemas import PolarizabilityModel, QuadratureSpec, Transition


@pytest.fixture
def spec() -> QuadratureSpec:
    return QuadratureSpec(rtol=1e-10)


@pytest.fixture
def electric() -> PolarizabilityModel:
    """Achiral single oscillator in internal units."""
    return PolarizabilityModel(
        name="electric", transitions=(Transition(omega=1.0, d=(1.0, 0.0, 0.0)),)
    )


@pytest.fixture
def chiral() -> PolarizabilityModel:
    """Chiral single oscillator with parallel moments, R = -0.1."""
    return PolarizabilityModel(
        name="chiral",
        transitions=(Transition(omega=1.0, d=(1.0, 0.0, 0.0), m_imag=(0.1, 0.0, 0.0)),),
    )


@pytest.fixture
def two_level() -> PolarizabilityModel:
    return PolarizabilityModel(
        name="two-level",
        transitions=(
            Transition(omega=0.8, d=(0.6, 0.2, 0.0), m_imag=(0.05, -0.02, 0.01)),
            Transition(omega=1.7, d=(0.0, 0.3, 0.9), m_imag=(0.0, 0.04, 0.03)),
        ),
    )


@pytest.fixture
def rb_like() -> PolarizabilityModel:
    return load_molecule("preset:rb-like")


@pytest.fixture
def mcp_like() -> PolarizabilityModel:
    return load_molecule("preset:3mcp-like")
