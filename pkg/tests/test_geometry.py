"""Array layouts, NAF conversion and the sum coarray."""
import math

import numpy as np
import pytest

from beamsweep import (
    ArrayGeometry,
    ConfigError,
    Direction,
    direction_vector,
    naf_of_direction,
    naf_resolution,
    sum_coarray,
)


def test_direction_bounds():
    Direction(math.pi / 2, -math.pi / 2)  # boundary ok
    with pytest.raises(ConfigError):
        Direction(1.8, 0.0)
    with pytest.raises(ConfigError):
        Direction(0.0, -1.8)


def test_direction_vector_values():
    np.testing.assert_allclose(direction_vector(Direction(0.0, 0.0)), [0.0, 0.0])
    v = direction_vector(Direction(math.radians(33.0), math.radians(-3.9)))
    np.testing.assert_allclose(
        v, [math.cos(math.radians(-3.9)) * math.sin(math.radians(33.0)),
            math.sin(math.radians(-3.9))], rtol=1e-15)


def test_naf_of_direction():
    d = Direction(math.radians(33.0), 0.0)
    assert naf_of_direction(d) == pytest.approx(0.5 * math.sin(math.radians(33.0)), rel=1e-15)
    # elevation shrinks the horizontal NAF by cos
    tilted = Direction(math.radians(33.0), math.radians(-3.9))
    assert abs(naf_of_direction(tilted)) < abs(naf_of_direction(d))
    assert naf_of_direction(Direction(math.pi / 2, 0.0)) == pytest.approx(0.5)


def test_naf_of_direction_errors():
    with pytest.raises(ConfigError):
        naf_of_direction(Direction(0.3, 0.0), spacing_wavelengths=0.0)
    # spacing over half a wavelength aliases at wide angles
    with pytest.raises(ConfigError):
        naf_of_direction(Direction(math.pi / 2, 0.0), spacing_wavelengths=1.0)


def test_uniform_linear_centered():
    g = ArrayGeometry.uniform_linear(8, 8)
    assert g.n_tx == 8 and g.n_rx == 8
    np.testing.assert_allclose(g.tx_positions[:, 0].sum(), 0.0, atol=1e-12)
    np.testing.assert_allclose(np.diff(g.tx_positions[:, 0]), 1.0)
    np.testing.assert_allclose(g.tx_positions[:, 1], 0.0)
    assert not g.tx_positions.flags.writeable


def test_geometry_validation():
    with pytest.raises(ConfigError):
        ArrayGeometry.uniform_linear(0, 8)
    with pytest.raises(ConfigError):
        ArrayGeometry(np.zeros((2, 3)), np.zeros((2, 2)))
    with pytest.raises(ConfigError):
        ArrayGeometry(np.zeros((2, 2)), np.zeros((2, 2)), spacing_wavelengths=-0.5)


def test_sum_coarray_8x8(geom8):
    co = sum_coarray(geom8)
    assert co.n_virtual == 15
    np.testing.assert_allclose(co.positions[:, 0], np.arange(-7, 8))
    np.testing.assert_allclose(co.positions[:, 1], 0.0)
    # triangular pair counts
    assert co.multiplicities.tolist() == [1, 2, 3, 4, 5, 6, 7, 8, 7, 6, 5, 4, 3, 2, 1]
    assert int(co.multiplicities.sum()) == 64


def test_sum_coarray_asymmetric():
    co = sum_coarray(ArrayGeometry.uniform_linear(2, 3))
    np.testing.assert_allclose(co.positions[:, 0], [-1.5, -0.5, 0.5, 1.5])
    assert co.multiplicities.tolist() == [1, 2, 2, 1]


def test_sum_coarray_multiplicity_total(rng):
    # pair count conservation holds for arbitrary layouts
    for _ in range(5):
        tx = np.round(rng.integers(-3, 4, size=(rng.integers(1, 6), 2)).astype(float))
        rx = np.round(rng.integers(-3, 4, size=(rng.integers(1, 6), 2)).astype(float))
        g = ArrayGeometry(tx, rx)
        co = sum_coarray(g)
        assert int(co.multiplicities.sum()) == g.n_tx * g.n_rx
        assert np.all(np.diff(co.positions[:, 0]) >= 0)


def test_naf_resolution():
    assert naf_resolution(8) == pytest.approx(1.0 / 15.0, rel=1e-15)
    assert naf_resolution(1) == 1.0
    with pytest.raises(ConfigError):
        naf_resolution(0)
    with pytest.raises(ConfigError):
        naf_resolution(2.5)
