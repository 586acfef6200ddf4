"""Maass cusp forms on deformable one-cusp Fuchsian groups.

Locates Maass forms by least-squares collocation of the truncated Fourier
expansion and tracks them along continuous deformations of the group.
"""

__version__ = "0.1.0"

from .bessel import BesselEvaluator, k_bessel, truncation_level
from .errors import (
    AccuracyError,
    DegenerateCollocation,
    DomainError,
    NoOverlap,
    NotConverged,
    UnsupportedLevel,
)
from .geometry import MoebiusMap, rotation_generator
from .groups import (
    GroupPresentation,
    Signature,
    arithmetic_specialization,
    build_group,
    dual_params,
    gamma222,
    gamma2222,
    reflect_params,
    symmetry_image,
    validate,
)

__all__ = [
    "AccuracyError",
    "BesselEvaluator",
    "DegenerateCollocation",
    "DomainError",
    "GroupPresentation",
    "MoebiusMap",
    "NoOverlap",
    "NotConverged",
    "Signature",
    "UnsupportedLevel",
    "arithmetic_specialization",
    "build_group",
    "dual_params",
    "gamma222",
    "gamma2222",
    "k_bessel",
    "reflect_params",
    "rotation_generator",
    "symmetry_image",
    "truncation_level",
    "validate",
]
