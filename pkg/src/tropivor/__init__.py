"""Exact tropical bisectors and Voronoi diagrams in the tropical torus R^{d+1}/R1."""
from ._kernel import BACKEND
from .bisect import bisector_k, bisector_two, circumcenters
from .errors import (
    DegeneracyError,
    GeneralPositionError,
    ParseError,
    PreconditionError,
    TropivorError,
    VerificationError,
)
from .oracle import SampleConfig, nearest_sites, verify_diagram
from .sweep2d import sweep
from .trop_core import SiteSet, TorusPoint, point, trop_dist
from .voronoi import voronoi_incremental, voronoi_standard

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DegeneracyError",
    "GeneralPositionError",
    "ParseError",
    "PreconditionError",
    "SampleConfig",
    "SiteSet",
    "TorusPoint",
    "TropivorError",
    "VerificationError",
    "bisector_k",
    "bisector_two",
    "circumcenters",
    "nearest_sites",
    "point",
    "sweep",
    "trop_dist",
    "verify_diagram",
    "voronoi_incremental",
    "voronoi_standard",
]
