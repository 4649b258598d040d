"""Disk-to-half-plane Möbius handle."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slelab.geometry import is_infinity
from slelab.mobius import MobiusMap, mobius_disk_to_half

thetas = st.floats(min_value=1e-3, max_value=math.pi - 1e-3)


def test_center_goes_to_i_at_right_angle():
    assert mobius_disk_to_half(math.pi / 2)(0) == pytest.approx(1j, abs=1e-15)


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 3, math.pi / 2])
def test_derivative_modulus_at_center(theta):
    g = mobius_disk_to_half(theta)
    assert abs(abs(g.derivative(0)) - 2 * math.sin(theta)) < 1e-12


def test_one_goes_to_zero_exactly():
    assert mobius_disk_to_half(0.7)(1) == 0


@settings(max_examples=50, deadline=None)
@given(thetas)
def test_marked_points(theta):
    g = mobius_disk_to_half(theta)
    assert is_infinity(g(cmath.exp(-2j * theta)))
    assert g(0) == pytest.approx(cmath.exp(1j * theta), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(thetas)
def test_disk_maps_into_upper_half_plane(theta):
    g = mobius_disk_to_half(theta)
    gen = np.random.default_rng(int(theta * 1e6))
    z = np.sqrt(gen.uniform(0, 0.99, 200)) * np.exp(2j * np.pi * gen.uniform(size=200))
    assert np.all(g.evaluate(z).imag > 0)


def test_inverse_round_trip_on_grid():
    g = mobius_disk_to_half(1.1)
    ginv = g.inverse()
    x, y = np.meshgrid(np.linspace(-3, 3, 10), np.linspace(0.1, 3, 10))
    w = (x + 1j * y).ravel()
    assert np.max(np.abs(g.evaluate(ginv.evaluate(w)) - w)) < 1e-10


def test_derivative_matches_finite_difference():
    g = mobius_disk_to_half(0.9)
    z, h = 0.2 + 0.1j, 1e-6
    fd = (g(z + h) - g(z - h)) / (2 * h)
    assert abs(fd - g.derivative(z)) < 1e-8


def test_compose_and_degenerate():
    f = MobiusMap(1, 2, 0, 1)
    g = MobiusMap(2, 0, 0, 1)
    assert f.compose(g)(3) == f(g(3))
    with pytest.raises(ValueError):
        MobiusMap(1, 2, 2, 4)
    with pytest.raises(ValueError):
        mobius_disk_to_half(0.0)
