import numpy as np
import pytest

from subdiff.stable_laws import StableLaw


@pytest.fixture(scope="session")
def half_law():
    return StableLaw(0.5)


@pytest.fixture(scope="session")
def third_law():
    return StableLaw(1.0 / 3.0)


def half_stable_density(t):
    """Closed-form oracle g_{1/2}(t) = (4 pi t^3)^(-1/2) exp(-1/(4t))."""
    t = np.asarray(t, dtype=float)
    return (4.0 * np.pi * t**3) ** -0.5 * np.exp(-1.0 / (4.0 * t))


def half_normal_density(t, s):
    """Hitting-time density for beta = 1/2: 2/sqrt(4 pi t) exp(-s^2/(4t))."""
    return 2.0 / np.sqrt(4.0 * np.pi * t) * np.exp(-np.asarray(s, float) ** 2 / (4.0 * t))
