# tests/conftest.py
"""Shared fixtures: the fiducial background, a small-number background and collapse parameters"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.core.background import CosmoParams, params_from_preset  # noqa: E402
from src.core.spectrum import CslParams, QuadratureConfig  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running numerical checks (deselect with -m 'not slow')")


@pytest.fixture
def fiducial():
    """H = 1e-5, eps = 0.005, N_* = 60, k_* = 5e-60"""
    return params_from_preset()


@pytest.fixture
def toy_params():
    """O(1) background where every scale is resolvable in doubles"""
    return CosmoParams(h_inf=1.0, eps_inf=0.005, eps2=0.0, eta0=-1e3, eta_e=-1.0,
                       eta_r=10.0, n_star=60.0, k_star=1e-3)


@pytest.fixture
def csl():
    return CslParams()


@pytest.fixture
def small_quad():
    return QuadratureConfig(q_points=3, max_levels=3)
