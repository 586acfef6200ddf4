import math

import numpy as np
import pytest

from maassforms.errors import DomainError
from maassforms.geometry import (
    IDENTITY,
    MoebiusMap,
    T_TRANSLATION,
    is_identity,
    matrix_power,
    proj_distance,
    rotation_generator,
)


def test_translation_moves_i():
    assert T_TRANSLATION.apply(1j) == 1 + 1j


def test_inversion_halves_height():
    m = MoebiusMap(0.0, 1.0, -1.0, 0.0)
    assert m.apply(2j) == pytest.approx(0.5j)


def test_rotation_fixed_point():
    r = rotation_generator(2, 0.0, 1.0)
    assert r.apply(1j) == pytest.approx(1j)


def test_r2_at_i_is_inversion():
    r = rotation_generator(2, 0.0, 1.0)
    assert proj_distance(r, MoebiusMap(0.0, 1.0, -1.0, 0.0)) < 1e-15


def test_r2_at_2_5ths():
    # fixed-point oracle: 5z^2 - 4z + 1 = 0 has root 2/5 + i/5, so the
    # order-2 rotation there is [[2,-1],[5,-2]] up to sign
    z = (4 + math.sqrt(abs(16 - 20)) * 1j) / 10
    assert z == pytest.approx(0.4 + 0.2j)
    r = rotation_generator(2, 0.4, 0.2)
    assert proj_distance(r, MoebiusMap(2.0, -1.0, 5.0, -2.0)) < 1e-12
    assert r.fixed_point() == pytest.approx(z)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6, 7])
def test_trace_is_2cos_pi_over_k(k):
    rng = np.random.default_rng(k)
    for _ in range(20):
        x = rng.uniform(-3, 3)
        y = rng.uniform(0.1, 5)
        r = rotation_generator(k, x, y)
        assert abs(r.trace()) == pytest.approx(2 * math.cos(math.pi / k), abs=1e-12)


def test_trace_k3_is_one():
    assert abs(rotation_generator(3, 0.7, 1.3).trace()) == pytest.approx(1.0)


def test_rotation_rejects_bad_height():
    with pytest.raises(DomainError):
        rotation_generator(2, 0.0, 0.0)
    with pytest.raises(DomainError):
        rotation_generator(2, 0.0, -1.0)


def test_compose_with_inverse_is_identity():
    assert is_identity(T_TRANSLATION.compose(T_TRANSLATION.inverse()))


def test_involution_squares_to_identity():
    r = rotation_generator(2, 0.0, 1.0)
    assert is_identity(r.compose(r))


def test_translation_inverse_entries():
    inv = T_TRANSLATION.inverse()
    assert proj_distance(inv, MoebiusMap(1.0, -1.0, 0.0, 1.0)) < 1e-15


@pytest.mark.parametrize("k", [2, 3, 4, 6])
def test_rotation_order(k):
    rng = np.random.default_rng(100 + k)
    for _ in range(10):
        r = rotation_generator(k, rng.uniform(-2, 2), rng.uniform(0.1, 4))
        assert is_identity(matrix_power(r, k), tol=1e-10)


def test_rotation_fixes_center():
    rng = np.random.default_rng(7)
    for _ in range(25):
        x = rng.uniform(-2, 2)
        y = rng.uniform(0.1, 4)
        k = int(rng.integers(2, 8))
        z = rotation_generator(k, x, y).apply(complex(x, y))
        assert abs(z - complex(x, y)) < 1e-12


def test_halfplane_preserved():
    rng = np.random.default_rng(11)
    for _ in range(50):
        a, b, c = rng.uniform(-2, 2, 3)
        d = (1 + b * c) / a if abs(a) > 0.1 else None
        if d is None:
            continue
        m = MoebiusMap(a, b, c, d)
        z = complex(rng.uniform(-5, 5), rng.uniform(0.01, 10))
        assert m.apply(z).imag > 0


def test_composition_associative():
    rng = np.random.default_rng(13)
    for _ in range(25):
        maps = []
        for _ in range(3):
            x, y = rng.uniform(-1, 1), rng.uniform(0.2, 2)
            maps.append(rotation_generator(2, x, y))
        m1, m2, m3 = maps
        left = m1.compose(m2).compose(m3)
        right = m1.compose(m2.compose(m3))
        assert proj_distance(left, right) < 1e-12


def test_negative_determinant_rejected():
    with pytest.raises(DomainError):
        MoebiusMap(1.0, 0.0, 0.0, -1.0)


def test_canonical_sign():
    m = MoebiusMap(-2.0, 1.0, -5.0, 2.0)
    assert m.a > 0


def test_fixed_point_requires_elliptic():
    with pytest.raises(DomainError):
        T_TRANSLATION.fixed_point()
    with pytest.raises(DomainError):
        MoebiusMap(2.0, 0.0, 0.0, 0.5).fixed_point()


def test_identity_tolerance():
    almost = MoebiusMap(1.0 + 5e-11, 1e-11, 0.0, 1.0)
    assert is_identity(almost, tol=1e-9)
    assert not is_identity(T_TRANSLATION)
