"""Upper half-plane geometry: Moebius maps and elliptic rotation generators.

Points of the upper half-plane are plain complex numbers z = x + iy with
y > 0.  Real 2x2 matrices of determinant one act by z -> (az+b)/(cz+d);
a matrix and its negative give the same map, so every ``MoebiusMap`` is
normalized to determinant one with a canonical sign (first nonzero entry
among a, c positive).  With that convention projective equality is plain
entrywise equality up to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

#: entrywise tolerance for "is +/- identity" style tests
IDENTITY_TOL = 1e-10


def require_upper_half(z: complex) -> complex:
    if z.imag <= 0.0:
        raise DomainError(f"point {z} is not in the upper half-plane")
    return z


@dataclass(frozen=True)
class MoebiusMap:
    """Determinant-one real matrix modulo sign."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det <= 0.0:
            raise DomainError(f"matrix has determinant {det} <= 0")
        r = 1.0 / math.sqrt(det)
        a, b, c, d = self.a * r, self.b * r, self.c * r, self.d * r
        # canonical sign: first nonzero entry among a, c positive
        if a < 0.0 or (a == 0.0 and c < 0.0):
            a, b, c, d = -a, -b, -c, -d
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __call__(self, z: complex) -> complex:
        return self.apply(z)

    def apply(self, z: complex) -> complex:
        """Linear fractional action on a point of the upper half-plane."""
        require_upper_half(z)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """Matrix product self * other (apply ``other`` first)."""
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def trace(self) -> float:
        return self.a + self.d

    def entries(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def fixed_point(self) -> complex:
        """Fixed point in the upper half-plane of an elliptic map."""
        tr = self.trace()
        disc = tr * tr - 4.0
        if disc >= 0.0 or self.c == 0.0:
            raise DomainError("map is not elliptic")
        # c z^2 + (d - a) z - b = 0
        root = complex(self.a - self.d, math.sqrt(-disc)) / (2.0 * self.c)
        if root.imag < 0.0:
            root = root.conjugate()
        return root


IDENTITY = MoebiusMap(1.0, 0.0, 0.0, 1.0)
T_TRANSLATION = MoebiusMap(1.0, 1.0, 0.0, 1.0)


def compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    return m1.compose(m2)


def invert(m: MoebiusMap) -> MoebiusMap:
    return m.inverse()


def apply(m: MoebiusMap, z: complex) -> complex:
    return m.apply(z)


def proj_distance(m1: MoebiusMap, m2: MoebiusMap) -> float:
    """Entrywise distance modulo sign (0 means the same projective map)."""
    dp = max(abs(m1.a - m2.a), abs(m1.b - m2.b), abs(m1.c - m2.c), abs(m1.d - m2.d))
    dm = max(abs(m1.a + m2.a), abs(m1.b + m2.b), abs(m1.c + m2.c), abs(m1.d + m2.d))
    return min(dp, dm)


def is_identity(m: MoebiusMap, tol: float = IDENTITY_TOL) -> bool:
    return proj_distance(m, IDENTITY) < tol


def rotation_generator(k: int, x: float, y: float) -> MoebiusMap:
    """Elliptic map rotating by 2*pi/k around the point x + iy.

    The raw matrix ((c*y - s*x, s*(x^2 + y^2)), (-s, c*y + s*x)) with
    c = cos(pi/k), s = sin(pi/k) has determinant y^2; normalization to
    determinant one divides all entries by y.
    """
    if k < 2:
        raise DomainError(f"rotation order k={k} must be >= 2")
    if y <= 0.0:
        raise DomainError(f"rotation center height y={y} must be positive")
    c = math.cos(math.pi / k)
    s = math.sin(math.pi / k)
    return MoebiusMap(c * y - s * x, s * (x * x + y * y), -s, c * y + s * x)


def matrix_power(m: MoebiusMap, n: int) -> MoebiusMap:
    if n < 0:
        return matrix_power(m.inverse(), -n)
    out = IDENTITY
    for _ in range(n):
        out = out.compose(m)
    return out
