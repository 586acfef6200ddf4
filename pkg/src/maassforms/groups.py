"""Deformable one-cusp group presentations and their arithmetic specializations.

Two families are supported, both genus 0 with a single cusp:

* ``gamma222(a, b)``: three elliptic involutions plus the unit translation,
  signature {0, {2,2,2}, 1}, a two-parameter deformation family containing
  the Fricke-extended Hecke groups of levels 5, 6, 8 (at b = 0) and a
  conjugate of level 9 at (9, 1/6).
* ``gamma2222(a, b, c, d)``: four elliptic involutions plus the unit
  translation, signature {0, {2,2,2,2}, 1}, a four-parameter family
  containing level 11 at (-1/3, 0, 1/3, 1/(2*sqrt(11))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, UnsupportedLevel
from .geometry import (
    IDENTITY,
    IDENTITY_TOL,
    MoebiusMap,
    T_TRANSLATION,
    matrix_power,
    proj_distance,
    rotation_generator,
)

GAMMA222 = "gamma222"
GAMMA2222 = "gamma2222"

#: exact parameters of the level-11 specialization
GAMMA2222_LEVEL11 = (-1.0 / 3.0, 0.0, 1.0 / 3.0, 0.5 / math.sqrt(11.0))


@dataclass(frozen=True)
class Signature:
    """Surface signature (genus, elliptic orders, number of cusps)."""

    genus: int
    elliptic_orders: tuple[int, ...]
    num_cusps: int

    def teichmuller_dim(self) -> int:
        return 6 * self.genus - 6 + 2 * len(self.elliptic_orders) + 2 * self.num_cusps

    def __str__(self) -> str:
        orders = ",".join(str(m) for m in self.elliptic_orders)
        return f"{{{self.genus},{{{orders}}},{self.num_cusps}}}"


@dataclass(frozen=True)
class GroupPresentation:
    """One deformable surface: elliptic generators plus the translation T."""

    family: str
    params: tuple[float, ...]
    generators: tuple[MoebiusMap, ...]  # the elliptic g_i; T is implicit
    signature: Signature
    elliptic_points: tuple[complex, ...]

    @property
    def translation(self) -> MoebiusMap:
        return T_TRANSLATION

    def min_elliptic_height(self) -> float:
        return min(p.imag for p in self.elliptic_points)

    def max_elliptic_height(self) -> float:
        return max(p.imag for p in self.elliptic_points)

    def relation_product(self) -> MoebiusMap:
        """g_1 g_2 ... g_k T, which must be (projectively) the identity."""
        prod = self.generators[0]
        for g in self.generators[1:]:
            prod = prod.compose(g)
        return prod.compose(T_TRANSLATION)

    def has_reflection_symmetry(self) -> bool:
        """True when the fundamental domain is mirror symmetric in x -> -x."""
        return self.family == GAMMA222 and abs(self.params[1]) < 1e-12


def _finish(family: str, params: tuple[float, ...],
            gens: tuple[MoebiusMap, ...], orders: tuple[int, ...]) -> GroupPresentation:
    points = []
    for i, g in enumerate(gens):
        try:
            points.append(g.fixed_point())
        except DomainError as exc:
            raise DomainError(
                f"{family}{params}: generator g{i + 1} is not elliptic") from exc
    pres = GroupPresentation(
        family=family,
        params=params,
        generators=gens,
        signature=Signature(0, orders, 1),
        elliptic_points=tuple(points),
    )
    report = validate(pres)
    if report.max_deviation > IDENTITY_TOL:
        raise DomainError(
            f"{family}{params}: relations violated by {report.max_deviation:.3e}")
    return pres


def gamma222(a: float, b: float) -> GroupPresentation:
    """Signature {0,{2,2,2},1} group with parameters (a, b).

    Generators g1 = r_2(b, 1/sqrt(a)), g2 = r_2(x, sqrt(y)) with

        Y = sqrt(4/a^2 + b^2)
        x = (2/a + b + Y) / 2
        y = (-4/a^2 + (1 - 2/a + b)(-b + Y)) / 2

    and g3 = T g1 g2.  Raises ``DomainError`` outside the parameter region
    where all three fixed points stay in the upper half-plane.
    """
    if a <= 0.0:
        raise DomainError(f"gamma222 needs a > 0, got a={a}")
    Y = math.sqrt(4.0 / a**2 + b * b)
    x = 0.5 * (2.0 / a + b + Y)
    y = 0.5 * (-4.0 / a**2 + (1.0 - 2.0 / a + b) * (Y - b))
    if y <= 0.0:
        raise DomainError(f"gamma222({a},{b}): second elliptic height^2 = {y} <= 0")
    g1 = rotation_generator(2, b, 1.0 / math.sqrt(a))
    g2 = rotation_generator(2, x, math.sqrt(y))
    g3 = T_TRANSLATION.compose(g1).compose(g2)
    return _finish(GAMMA222, (float(a), float(b)), (g1, g2, g3), (2, 2, 2))


def gamma2222(a: float, b: float, c: float, d: float) -> GroupPresentation:
    """Signature {0,{2,2,2,2},1} group with parameters (a, b, c, d).

    Generators g1 = r_2(a, x), g2 = r_2(b, y), g3 = r_2(c, z),
    g4 = r_2(1/2, d) with

        x = sqrt( (a-b)((1/2+a)(c-1/2) + d^2) / (1/2-c) )
        y = d * sqrt( (a-b)(b-c) / ((1/2+a)(1/2-c)) )
        z = sqrt( (b-c)((1/2+a)(c-1/2) + d^2) / (1/2+a) )

    Raises ``DomainError`` on a negative radicand or nonpositive height.
    """
    if d <= 0.0:
        raise DomainError(f"gamma2222 needs d > 0, got d={d}")
    core = (0.5 + a) * (c - 0.5) + d * d
    rad_x = (a - b) * core / (0.5 - c)
    rad_y = (a - b) * (b - c) / ((0.5 + a) * (0.5 - c))
    rad_z = (b - c) * core / (0.5 + a)
    for name, rad in (("x", rad_x), ("y", rad_y), ("z", rad_z)):
        if rad <= 0.0:
            raise DomainError(
                f"gamma2222({a},{b},{c},{d}): radicand for {name} is {rad} <= 0")
    x = math.sqrt(rad_x)
    y = d * math.sqrt(rad_y)
    z = math.sqrt(rad_z)
    g1 = rotation_generator(2, a, x)
    g2 = rotation_generator(2, b, y)
    g3 = rotation_generator(2, c, z)
    g4 = rotation_generator(2, 0.5, d)
    return _finish(
        GAMMA2222, (float(a), float(b), float(c), float(d)),
        (g1, g2, g3, g4), (2, 2, 2, 2))


def build_group(family: str, params) -> GroupPresentation:
    params = tuple(float(p) for p in params)
    if family == GAMMA222:
        if len(params) != 2:
            raise DomainError(f"gamma222 takes 2 parameters, got {len(params)}")
        return gamma222(*params)
    if family == GAMMA2222:
        if len(params) != 4:
            raise DomainError(f"gamma2222 takes 4 parameters, got {len(params)}")
        return gamma2222(*params)
    raise DomainError(f"unknown family {family!r}")


def arithmetic_specialization(q: int) -> tuple[str, tuple[float, ...], str]:
    """Parameters at which the families specialize to the level-q group.

    For q = 9 the presentation is the conjugate by [[1,1/6],[0,1]]; the
    spectrum is identical but Fourier coefficients carry the phase twist
    exp(2*pi*i*n/6) (see ``verification.hecke_check``'s x_shift argument).
    """
    if q in (5, 6, 8):
        return GAMMA222, (float(q), 0.0), ""
    if q == 9:
        return GAMMA222, (9.0, 1.0 / 6.0), (
            "conjugate presentation: the level-9 group equals "
            "[[1,1/6],[0,1]] gamma222(9,1/6) [[1,1/6],[0,1]]^-1; "
            "spectrum identical, coefficients twisted by x_shift=1/6")
    if q == 11:
        return GAMMA2222, GAMMA2222_LEVEL11, ""
    raise UnsupportedLevel(f"no deformable one-cusp presentation for level {q}")


def reflect_params(family: str, params) -> tuple[float, ...]:
    """(a, b) -> (a, -b); the two presentations are the same group."""
    if family != GAMMA222:
        raise DomainError("reflection symmetry is only defined for gamma222")
    a, b = params
    return (a, -b)


def dual_params(family: str, params) -> tuple[float, ...]:
    """(a, b) -> (4a/(a-4), b); at b = 0 the dual presents the same surface.

    The map is an involution and fixes a = 8; a = 4 corresponds to the
    merging of two cusps and is excluded.
    """
    if family != GAMMA222:
        raise DomainError("the dual map is only defined for gamma222")
    a, b = params
    if abs(a - 4.0) < 1e-12:
        raise DomainError("a = 4 merges two cusps; the dual map is singular there")
    return (4.0 * a / (a - 4.0), b)


def symmetry_image(family: str, params, which: str) -> tuple[float, ...]:
    if which == "reflect":
        return reflect_params(family, params)
    if which == "dual":
        return dual_params(family, params)
    raise DomainError(f"unknown symmetry {which!r}")


@dataclass
class ValidationReport:
    order_deviations: list[float] = field(default_factory=list)
    relation_deviation: float = 0.0
    heights: list[float] = field(default_factory=list)

    @property
    def max_deviation(self) -> float:
        devs = list(self.order_deviations) + [self.relation_deviation]
        return max(devs) if devs else 0.0


def validate(pres: GroupPresentation) -> ValidationReport:
    """Numeric check of all order and product relations."""
    report = ValidationReport()
    for g, order in zip(pres.generators, pres.signature.elliptic_orders):
        report.order_deviations.append(proj_distance(matrix_power(g, order), IDENTITY))
    report.relation_deviation = proj_distance(pres.relation_product(), IDENTITY)
    report.heights = [p.imag for p in pres.elliptic_points]
    return report
