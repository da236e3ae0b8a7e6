"""Convergent two-scale expansions for the Dirichlet problem in a perforated plane sector."""

from .geometry import BoundaryCurve, Opening, SectorScene, symmetric_scene, transform_scene, validate_pattern
from .cornerseries import AnalyticRHS, RadialStepRHS, build_index_set, corner_expansion
from .diophantine import LiouvilleCertificate, classify, continued_fraction, sin_series_radius
from .potential import discretize, dlp_eval, solve_xi
from .bie_system import assemble_M, build_meshes, neumann_series, solve_direct, taylor_blocks
from .twoscale import build_two_scale, convergence_study, solve_unperturbed

__version__ = "0.1.0"

__all__ = [
    "AnalyticRHS", "BoundaryCurve", "LiouvilleCertificate", "Opening", "RadialStepRHS", "SectorScene",
    "assemble_M", "build_index_set", "build_meshes", "build_two_scale", "classify", "continued_fraction",
    "convergence_study", "corner_expansion", "discretize", "dlp_eval", "neumann_series", "sin_series_radius",
    "solve_direct", "solve_unperturbed", "solve_xi", "symmetric_scene", "taylor_blocks", "transform_scene",
    "validate_pattern",
]
