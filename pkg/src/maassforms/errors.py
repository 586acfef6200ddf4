"""Exception types shared across the package."""


class DomainError(ValueError):
    """Parameters lie outside the region where a construction is defined."""


class UnsupportedLevel(DomainError):
    """Requested arithmetic level has no known one-cusp presentation here."""


class AccuracyError(ArithmeticError):
    """A numerical routine could not reach its accuracy target."""


class DegenerateCollocation(RuntimeError):
    """Too few collocation points obtained nontrivial images."""


class NotConverged(RuntimeError):
    """A refinement or corrector step failed to reach an acceptable minimum."""


class NoOverlap(ValueError):
    """Two curves share no common window on the requested axis."""
