"""Collocation points on a horizontal line and their pullbacks into the group.

Each sample point z on the line Im z = y0 is mapped to a group image
z* = g z with strictly larger imaginary part by greedily applying, at every
step, the elliptic generator (combined with the integer translation that
brings its isometric circle over the point) that raises the height most.
The loop stops when no generator raises the height; a final translation
returns the real part to the period [-1/2, 1/2), which leaves the Fourier
expansion invariant.

Points whose pullback is a pure translation would give identically zero
rows in the linear system; they are perturbed by half a grid step once and
dropped if still trivial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateCollocation, DomainError
from .groups import GroupPresentation

#: a generator must beat this factor to count as raising the height
_RAISE_MARGIN = 1.0 - 1e-12
_MAX_PULLBACK_STEPS = 200


def _reduce_x(z: complex) -> complex:
    """Translate the real part into [-1/2, 1/2)."""
    x = z.real - math.floor(z.real + 0.5)
    return complex(x, z.imag)


def pull_to_high_point(group: GroupPresentation, z: complex):
    """Greedy height-maximizing pullback of z.

    Returns (z_image, word) where ``word`` lists the indices of the applied
    elliptic generators (empty when only translations were used).  The
    image has its real part reduced to [-1/2, 1/2).
    """
    gens = group.generators
    word: list[int] = []
    for _ in range(_MAX_PULLBACK_STEPS):
        best = None
        best_t = _RAISE_MARGIN
        for j, g in enumerate(gens):
            if g.c == 0.0:
                continue
            # isometric circle of g T^m has center -d/c - m, radius 1/|c|;
            # search the integer shifts that put it over z
            m0 = round(-g.d / g.c - z.real)
            for m in (m0 - 1, m0, m0 + 1):
                t = abs(g.c * (z + m) + g.d)
                if t < best_t:
                    best_t = t
                    best = (j, m)
        if best is None:
            break
        j, m = best
        z = gens[j].apply(z + m)
        word.append(j)
    else:
        raise DegenerateCollocation("pullback did not terminate")
    return _reduce_x(z), tuple(word)


@dataclass(frozen=True)
class CollocationSet:
    """Sample points z_i on the line Im z = y0 with their group images."""

    y0: float
    points: tuple[complex, ...]
    images: tuple[tuple[tuple[int, ...], complex], ...]  # (word, z*)

    @property
    def size(self) -> int:
        return len(self.points)

    def min_image_height(self) -> float:
        return min(im.imag for _, im in self.images)


def default_line_height(group: GroupPresentation, y0_factor: float = 0.8) -> float:
    """Default collocation height: below every elliptic fixed point."""
    return y0_factor * group.min_elliptic_height()


def choose_points(group: GroupPresentation, M: int, oversample: float = 1.25,
                  y0: float | None = None, offset: float = 0.0) -> CollocationSet:
    """Collocation set with N = ceil(oversample * 4M) candidate points.

    ``offset`` shifts the sample grid by offset/N in x; varying it gives
    statistically independent point sets for cross-checks.  Raises
    ``DegenerateCollocation`` if fewer than 4M + 2 points obtain images
    strictly above the line.
    """
    if oversample < 1.1:
        raise DomainError(f"oversample {oversample} below the minimum 1.1")
    if y0 is None:
        y0 = default_line_height(group)
    if not 0.0 < y0 < group.min_elliptic_height():
        raise DomainError(
            f"line height y0={y0} must lie in (0, {group.min_elliptic_height():.4f})")
    n = int(math.ceil(oversample * 4 * M))
    points = []
    images = []
    for i in range(n):
        x = -0.5 + (i + 0.5 + offset) / n
        z = complex(x - math.floor(x + 0.5), y0)
        zs, word = pull_to_high_point(group, z)
        if not word or abs(zs - z) < 1e-12:
            # trivial pullback: perturb by half a grid step and retry
            z = complex(z.real + 0.5 / n, y0)
            z = complex(z.real - math.floor(z.real + 0.5), y0)
            zs, word = pull_to_high_point(group, z)
            if not word or abs(zs - z) < 1e-12:
                continue
        points.append(z)
        images.append((word, zs))
    if len(points) < 4 * M + 2:
        raise DegenerateCollocation(
            f"only {len(points)} of {n} points map strictly above y0={y0} "
            f"(need {4 * M + 2})")
    return CollocationSet(y0=y0, points=tuple(points), images=tuple(images))
