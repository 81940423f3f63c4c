"""Balanced phase-field interface evolution on uniform grids."""

from .grid import Field, FieldError, GridSpec, bilaplacian, laplacian
from .model import (
    ModelWeights,
    balance_residuals,
    el_residual,
    energy,
    evolve,
    gl_weights,
    optimal_width,
    reinitialize,
    stable_dt,
    step,
    weights_from_width,
)
from .profile import ProfileSpec, SignedDistanceInit, init_field, relax_profile_1d
from .surfaces import Plane, Sphere, Torus

__version__ = "0.1.0"

__all__ = [
    "Field",
    "FieldError",
    "GridSpec",
    "ModelWeights",
    "Plane",
    "ProfileSpec",
    "SignedDistanceInit",
    "Sphere",
    "Torus",
    "balance_residuals",
    "bilaplacian",
    "el_residual",
    "energy",
    "evolve",
    "gl_weights",
    "init_field",
    "laplacian",
    "optimal_width",
    "reinitialize",
    "relax_profile_1d",
    "stable_dt",
    "step",
    "weights_from_width",
]
