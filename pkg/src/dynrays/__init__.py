"""Escaping sets and dynamic rays of ``a e^z + b e^-z`` and ``lambda e^z``."""

from .cantor import (IntervalSet, RectSet, cantor_intervals, fat_cantor, karpinska_generate,
                     middle_third, product_square)
from .dimension import (BoxCount, CoverGeneration, box_counting_dimension, box_counts,
                        cover_measure, cover_refinement, self_similarity_dimension)
from .dynamics import (EscapeRecord, Itinerary, ItinerarySymbol, MapSpec, ParabolaSpec,
                       Status, check_horizontal_expansion, classify, derivative, evaluate,
                       in_parabola, iterate, iterate_many, itinerary, parse_map)
from .errors import (BranchDomainError, ConfigError, DegenerateFit, DomainError, DynError,
                     GeometryError, InfeasibleRemoval, OverflowGuard, VerificationError)
from .measure import (DensityEstimate, SampleSpec, escaping_density, exponential_survival,
                      strip_complement_measure)
from .rays import RayApproximation, inverse_branch, landing_point, trace_ray

__version__ = "0.1.0"

__all__ = [
    "BoxCount", "BranchDomainError", "ConfigError", "CoverGeneration", "DegenerateFit",
    "DensityEstimate", "DomainError", "DynError", "EscapeRecord", "GeometryError",
    "InfeasibleRemoval", "IntervalSet", "Itinerary", "ItinerarySymbol", "MapSpec",
    "OverflowGuard", "ParabolaSpec", "RayApproximation", "RectSet", "SampleSpec", "Status",
    "VerificationError", "box_counting_dimension", "box_counts", "cantor_intervals",
    "check_horizontal_expansion", "classify", "cover_measure", "cover_refinement",
    "derivative", "escaping_density", "evaluate", "exponential_survival", "fat_cantor",
    "in_parabola", "inverse_branch", "iterate", "iterate_many", "itinerary",
    "karpinska_generate", "landing_point", "middle_third", "parse_map", "product_square",
    "self_similarity_dimension", "strip_complement_measure", "trace_ray",
]
