import math

import numpy as np
import pytest

from maassforms.errors import DomainError, UnsupportedLevel
from maassforms.geometry import proj_distance, rotation_generator
from maassforms.groups import (
    GAMMA2222_LEVEL11,
    arithmetic_specialization,
    build_group,
    dual_params,
    gamma222,
    gamma2222,
    reflect_params,
    symmetry_image,
    validate,
)


class TestGamma222:
    def test_level5_generators(self):
        # hand evaluation of the closed forms at (5, 0):
        # Y = 2/5, x = 2/5, y = 1/25
        g = gamma222(5, 0)
        assert proj_distance(g.generators[0], rotation_generator(2, 0.0, 5 ** -0.5)) < 1e-14
        assert proj_distance(g.generators[1], rotation_generator(2, 0.4, 0.2)) < 1e-14

    def test_level5_relation(self):
        g = gamma222(5, 0)
        assert validate(g).relation_deviation < 1e-12

    def test_figure_point_well_defined(self):
        g = gamma222(6, 0.1)
        assert validate(g).max_deviation < 1e-10
        assert all(p.imag > 0 for p in g.elliptic_points)

    def test_signature(self):
        g = gamma222(5, 0)
        assert g.signature.genus == 0
        assert g.signature.elliptic_orders == (2, 2, 2)
        assert g.signature.num_cusps == 1
        assert g.signature.teichmuller_dim() == 2
        assert str(g.signature) == "{0,{2,2,2},1}"

    def test_rejects_bad_parameters(self):
        with pytest.raises(DomainError):
            gamma222(-1.0, 0.0)
        with pytest.raises(DomainError):
            gamma222(0.5, 0.0)  # second height^2 goes negative

    def test_validity_region_random(self):
        rng = np.random.default_rng(42)
        checked = 0
        for _ in range(100):
            a = rng.uniform(4.5, 9.0)
            b = rng.uniform(-0.15, 0.15)
            try:
                g = gamma222(a, b)
            except DomainError:
                continue
            report = validate(g)
            assert report.max_deviation < 1e-10, (a, b)
            checked += 1
        assert checked >= 90  # the sampled box is inside the deformable region


class TestGamma2222:
    def test_level11_heights(self):
        g = gamma2222(*GAMMA2222_LEVEL11)
        x = 1.0 / (3.0 * math.sqrt(11.0))
        y = 1.0 / math.sqrt(11.0)
        heights = [p.imag for p in g.elliptic_points]
        assert heights[0] == pytest.approx(x, rel=1e-12)
        assert heights[1] == pytest.approx(y, rel=1e-12)
        assert heights[2] == pytest.approx(x, rel=1e-12)
        assert heights[3] == pytest.approx(0.5 / math.sqrt(11.0), rel=1e-12)

    def test_level11_relation(self):
        g = gamma2222(*GAMMA2222_LEVEL11)
        assert validate(g).max_deviation < 1e-10

    def test_table_row_well_defined(self):
        g = gamma2222(-0.31, 0.03, 0.37, 0.1406783)
        assert validate(g).max_deviation < 1e-10

    def test_rejects_negative_radicand(self):
        with pytest.raises(DomainError):
            gamma2222(0.0, -1.0 / 3.0, 1.0 / 3.0, 0.15)

    def test_rejects_nonpositive_d(self):
        with pytest.raises(DomainError):
            gamma2222(-1.0 / 3.0, 0.0, 1.0 / 3.0, 0.0)

    def test_random_neighborhood(self):
        rng = np.random.default_rng(4242)
        base = np.array(GAMMA2222_LEVEL11)
        for _ in range(100):
            params = base + rng.uniform(-0.05, 0.05, 4)
            try:
                g = gamma2222(*params)
            except DomainError:
                continue
            assert validate(g).max_deviation < 1e-10, tuple(params)


class TestArithmeticSpecialization:
    @pytest.mark.parametrize("q", [5, 6, 8])
    def test_small_levels(self, q):
        family, params, note = arithmetic_specialization(q)
        assert family == "gamma222"
        assert params == (float(q), 0.0)
        assert note == ""

    def test_level9_is_conjugate(self):
        family, params, note = arithmetic_specialization(9)
        assert family == "gamma222"
        assert params == (9.0, pytest.approx(1.0 / 6.0))
        assert "conjugate" in note

    def test_level11(self):
        family, params, note = arithmetic_specialization(11)
        assert family == "gamma2222"
        assert params == pytest.approx(GAMMA2222_LEVEL11)

    @pytest.mark.parametrize("q", [4, 7, 10, 12])
    def test_unsupported(self, q):
        with pytest.raises(UnsupportedLevel):
            arithmetic_specialization(q)


class TestSymmetries:
    def test_dual_of_5_is_20(self):
        assert dual_params("gamma222", (5.0, 0.0)) == (20.0, 0.0)

    def test_dual_fixes_8(self):
        assert dual_params("gamma222", (8.0, 0.0))[0] == pytest.approx(8.0)

    def test_reflect(self):
        assert reflect_params("gamma222", (5.0, 0.2)) == (5.0, -0.2)

    def test_dual_is_involution(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = rng.uniform(4.2, 30.0)
            twice = dual_params("gamma222", dual_params("gamma222", (a, 0.0)))
            assert twice[0] == pytest.approx(a, abs=1e-12)

    def test_dual_singular_at_4(self):
        with pytest.raises(DomainError):
            dual_params("gamma222", (4.0, 0.0))

    def test_symmetry_image_dispatch(self):
        assert symmetry_image("gamma222", (5.0, 0.1), "reflect") == (5.0, -0.1)
        assert symmetry_image("gamma222", (5.0, 0.1), "dual") == (20.0, 0.1)
        with pytest.raises(DomainError):
            symmetry_image("gamma222", (5.0, 0.1), "rotate")


class TestValidate:
    def test_exact_construction(self):
        assert validate(gamma222(5, 0)).max_deviation < 1e-12

    def test_deformed_construction(self):
        assert validate(gamma222(6, 0.1)).max_deviation < 1e-10

    def test_corrupted_generator(self):
        from dataclasses import replace

        g = gamma222(5, 0)
        bad = replace(g, generators=(
            g.generators[0], g.generators[1],
            rotation_generator(2, 0.51, 0.22)))
        assert validate(bad).max_deviation > 0.01


def test_build_group_dispatch():
    assert build_group("gamma222", (5, 0)).family == "gamma222"
    assert build_group("gamma2222", GAMMA2222_LEVEL11).family == "gamma2222"
    with pytest.raises(DomainError):
        build_group("gamma22", (5, 0))
    with pytest.raises(DomainError):
        build_group("gamma222", (5, 0, 1))


def test_reflection_symmetry_flag():
    assert gamma222(5, 0).has_reflection_symmetry()
    assert not gamma222(5, 0.05).has_reflection_symmetry()
    assert not gamma2222(*GAMMA2222_LEVEL11).has_reflection_symmetry()
