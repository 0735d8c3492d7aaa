"""
Shared fixtures for the test suite
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.grid import build_grid_pair
from src.models import VasicekParams, VolatilityModel, vasicek_model
from src.simulate import NoiseKind


class FlatModel(VolatilityModel):
    """Constant volatility and a flat initial curve"""

    def __init__(self, level: float, vol: float = 0.0, d: int = 1):
        self.level = level
        self.vol = vol
        self.d = d

    def sigma(self, j, t, T, z):
        return self.vol + np.zeros(np.broadcast_shapes(np.shape(T), np.shape(z)))

    def f0(self, T):
        return self.level + np.zeros(np.shape(T))


class ZeroNoise:
    """Noise source returning zero draws"""

    kind = NoiseKind.WEAK_BERNOULLI

    def __init__(self, n_paths: int, d: int = 1):
        self.shape = (n_paths, d)

    def draw(self, k):
        return np.zeros(self.shape)


@pytest.fixture
def vasicek_params():
    return VasicekParams(sigma=0.02, kappa=1.0, r0=0.05, theta=1.0)


@pytest.fixture
def vasicek(vasicek_params):
    return vasicek_model(vasicek_params)


@pytest.fixture
def flat_model():
    return FlatModel


@pytest.fixture
def zero_noise():
    return ZeroNoise


@pytest.fixture
def half_grid():
    """delta = 0.5, h = 0.25, caplet 1 -> 6"""
    return build_grid_pair(0.0, 1.0, 6.0, 0.5, 0.25, 1)


@pytest.fixture
def simpson_grid():
    """delta = 2/3, h = 0.2: t* = 1 lies inside [T_1, T_2)"""
    return build_grid_pair(0.0, 1.0, 6.0, 6.0 / 9.0, 0.2, 3)
