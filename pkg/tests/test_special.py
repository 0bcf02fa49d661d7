import math

import numpy as np
import pytest

import core.special
from core.exception import ConvergenceException, DomainException
from core.special import lower_incomplete_gamma, modified_incomplete_gamma

Z_GRID = np.concatenate([np.logspace(-6, 0, 25), np.linspace(1.0, 20.0, 40)])
S_GRID = (0.3, 0.5, 1.0, 1.25, 2.5, 5.0)


def test_lower_gamma_s1_is_one_minus_exp():
    for z in Z_GRID:
        assert abs(lower_incomplete_gamma(1.0, z) - (-math.expm1(-z))) <= 1e-13


@pytest.mark.parametrize("z", [1e-4, 0.1, 0.5, 1.4, 1.6, 3.0, 10.0])
def test_lower_gamma_half_matches_erf(z):
    expected = math.sqrt(math.pi) * math.erf(math.sqrt(z))
    assert math.isclose(lower_incomplete_gamma(0.5, z), expected, rel_tol=1e-13)


def test_lower_gamma_at_zero():
    assert lower_incomplete_gamma(2.0, 0.0) == 0.0


@pytest.mark.parametrize("s", [0.3, 0.5, 1.25, 2.5])
def test_modified_gamma_small_z_limit(s):
    assert abs(modified_incomplete_gamma(s, 1e-12) - 1 / s) <= 1e-6
    # 关闭极限切换时级数本身也收敛到 1/s
    assert abs(modified_incomplete_gamma(s, 1e-12, limit_z=0.0) - 1 / s) <= 1e-6
    assert modified_incomplete_gamma(s, 0.0) == 1 / s


def test_modified_gamma_sandwich():
    for s in S_GRID:
        for z in [0.0, 1e-9, 1e-3, 0.1, 0.5, 1.0, 3.0, 10.0, 50.0, 500.0]:
            value = modified_incomplete_gamma(s, z)
            assert math.exp(-z) / s * (1 - 1e-14) <= value <= 1 / s * (1 + 1e-14)


def test_modified_gamma_consistent_with_lower():
    for s in S_GRID:
        for z in [0.01, 0.7, 2.0, 8.0]:
            assert math.isclose(modified_incomplete_gamma(s, z) * z**s, lower_incomplete_gamma(s, z), rel_tol=1e-12)


@pytest.mark.parametrize("s", [0.5, 1.25, 2.5])
def test_modified_gamma_continuous_across_branches(s):
    # z < s+1 走级数，否则走连分式
    below = modified_incomplete_gamma(s, s + 1 - 1e-9)
    above = modified_incomplete_gamma(s, s + 1 + 1e-9)
    assert abs(below - above) <= 1e-12


def test_modified_gamma_large_z_is_complete_gamma_scaled():
    s, z = 1.75, 400.0
    assert math.isclose(modified_incomplete_gamma(s, z), math.gamma(s) / z**s, rel_tol=1e-12)


@pytest.mark.parametrize("s, z", [(0.0, 1.0), (-1.0, 1.0), (1.0, -1e-3), (1.0, math.inf), (math.nan, 1.0)])
def test_domain_errors(s, z):
    with pytest.raises(DomainException):
        modified_incomplete_gamma(s, z)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(s, z)


@pytest.mark.parametrize("s, z", [(10.0, 5.0), (0.5, 20.0)])
def test_non_convergence_raises(monkeypatch, s, z):
    # 两个分支：级数与连分式
    monkeypatch.setattr(core.special, "GAMMA_MAX_ITER", 0)
    with pytest.raises(ConvergenceException):
        lower_incomplete_gamma(s, z)
    with pytest.raises(ConvergenceException):
        modified_incomplete_gamma(s, z)
