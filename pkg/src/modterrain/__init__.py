"""modterrain: modular forms as terrain.

Evaluates classical modular forms to controlled accuracy anywhere in the
upper half-plane and turns sampled values into vertex-colored 3D meshes
(PLY/OBJ), 2D domain-coloring images, and hillshaded relief images.
"""

__version__ = "0.1.0"

from .numerics import APComplex, PolarForm, cexp, cpow_int, escalate, polar
from .moebius import ReductionResult, UnimodularMatrix, apply, automorphy_factor, reduce
from .qexpansion import (
    EvalOptions,
    FormDescriptor,
    delta_coefficients,
    delta_form,
    delta_product,
    eval_general_level,
    eval_reduced,
    eval_series,
    truncation_terms,
)
from .lmfdb_client import CoefficientFile, FormLabel, fetch, parse_label, to_descriptor
from .terrain import (
    GridSpec,
    HeightMapSpec,
    ScalarField,
    TerrainMesh,
    domain_color_2d,
    height,
    hillshade,
    phase_to_color,
    sample_field,
    triangulate,
)
from .meshio import Image, export_obj, export_ply, import_obj, import_ply, write_png

__all__ = [
    "APComplex", "PolarForm", "cexp", "cpow_int", "escalate", "polar",
    "UnimodularMatrix", "ReductionResult", "apply", "automorphy_factor", "reduce",
    "FormDescriptor", "EvalOptions", "delta_coefficients", "delta_form",
    "delta_product", "eval_series", "truncation_terms", "eval_reduced",
    "eval_general_level",
    "FormLabel", "CoefficientFile", "parse_label", "fetch", "to_descriptor",
    "GridSpec", "HeightMapSpec", "ScalarField", "TerrainMesh",
    "height", "phase_to_color", "sample_field", "triangulate", "hillshade",
    "domain_color_2d",
    "Image", "export_ply", "export_obj", "import_ply", "import_obj", "write_png",
]
