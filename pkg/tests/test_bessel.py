import math

import numpy as np
import pytest
from scipy.special import spherical_jn

from nsbf_pricer.bessel import spherical_jn_block


def closed_j0(x):
    return np.where(x == 0, 1.0, np.sin(x) / np.where(x == 0, 1.0, x))


def closed_j1(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    nz = x != 0
    out[nz] = np.sin(x[nz]) / x[nz] ** 2 - np.cos(x[nz]) / x[nz]
    return out


def closed_j2(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    nz = x != 0
    out[nz] = (3.0 / x[nz] ** 3 - 1.0 / x[nz]) * np.sin(x[nz]) - 3.0 * np.cos(x[nz]) / x[nz] ** 2
    return out


def test_j0_at_pi():
    block = spherical_jn_block(math.pi, 3)
    assert abs(block[0]) < 1e-14


def test_j1_at_two():
    block = spherical_jn_block(2.0, 3)
    expected = math.sin(2.0) / 4.0 - math.cos(2.0) / 2.0  # 0.435397...
    assert block[1] == pytest.approx(expected, abs=1e-14)
    assert block[1] == pytest.approx(0.4353977749, abs=1e-9)


def test_zero_argument():
    block = spherical_jn_block(0.0, 5)
    assert block[0] == 1.0
    assert np.all(block[1:] == 0.0)


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 50.0, 100.0])
def test_closed_forms_low_orders(x):
    block = spherical_jn_block(x, 90)
    assert abs(block[0] - closed_j0(np.array([x]))[0]) < 1e-12
    assert abs(block[1] - closed_j1(np.array([x]))[0]) < 1e-12
    assert abs(block[2] - closed_j2(np.array([x]))[0]) < 1e-12


def test_block_against_scipy():
    x = np.concatenate([
        np.linspace(1e-4, 1.9, 23),
        np.linspace(2.0, 30.0, 41),
        np.linspace(30.5, 180.0, 37),
    ])
    m_max = 61
    block = spherical_jn_block(x, m_max)
    for m in range(0, m_max + 1, 7):
        ref = spherical_jn(m, x)
        err = np.abs(block[m] - ref)
        # absolute scale set by the largest order-m value
        assert np.max(err) < 1e-12 * max(1.0, np.max(np.abs(ref)))


def test_bounded_by_one():
    x = np.linspace(0.0, 150.0, 301)
    block = spherical_jn_block(x, 40)
    assert np.max(np.abs(block)) <= 1.0 + 1e-12


def test_near_sine_zeros_stable():
    # normalization must not blow up where sin(x)/x vanishes
    x = np.array([math.pi, 2 * math.pi, 15 * math.pi])
    block = spherical_jn_block(x, 30)
    ref = np.array([spherical_jn(m, x) for m in range(31)])
    assert np.max(np.abs(block - ref)) < 1e-12


def test_scalar_and_array_shapes():
    assert spherical_jn_block(3.0, 4).shape == (5,)
    assert spherical_jn_block(np.ones((2, 3)), 4).shape == (5, 2, 3)
    with pytest.raises(ValueError):
        spherical_jn_block(-1.0, 3)
