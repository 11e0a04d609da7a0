"""Spectral lab for a locally damped dispersion-generalized Benjamin-Ono flow on the torus.

Submodules: :mod:`.spectral` (grids, transforms, dealiased products),
:mod:`.damping` (localized damping and its diagonal/off-diagonal splitting),
:mod:`.semigroup` (linear flow, spectra, Gramians, exponential sums),
:mod:`.solver` (integrating-factor RK4 for the nonlinear flow),
:mod:`.analysis` (Z^b norms, estimate ratios, arithmetic checks) and
:mod:`.cli`.
"""

from .damping import DampingDecomposition, DampingProfile, ProfileKind, build_profile, compute_ck
from .errors import (BlowUpError, ConditioningError, ConfigError, DGBOError, GridMismatchError, InvariantError,
                     PrecisionError, ProfileError)
from .params import ModelParams
from .semigroup import build_linear_matrix, observability_gramian, spectral_abscissa
from .solver import SimConfig, Trajectory, simulate
from .spectral import SpectralField, TorusGrid

__version__ = "0.1.0"

__all__ = [
    "BlowUpError", "ConditioningError", "ConfigError", "DGBOError", "DampingDecomposition", "DampingProfile",
    "GridMismatchError", "InvariantError", "ModelParams", "PrecisionError", "ProfileError", "ProfileKind",
    "SimConfig", "SpectralField", "TorusGrid", "Trajectory", "build_linear_matrix", "build_profile",
    "compute_ck", "observability_gramian", "simulate", "spectral_abscissa",
]
