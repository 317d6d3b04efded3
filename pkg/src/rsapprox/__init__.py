"""Wedge-local approximation of free-field coherent states in 1+1 dimensions."""

__version__ = "0.1.0"

from .geometry import Frame, Point2, Region, W_L, W_R, causal_complement, causal_completion, relate, select_frame
from .testfn import (
    AnalyticGaussian,
    FieldModel,
    GridBump,
    Lattice,
    NullBoxBump,
    RapidityGrid,
    TemporalStep,
    apply_cutoff,
    boost_pullback,
    on_shell_profile,
    reflect,
    support_box,
)
from .qft import boost_correlation, coherent_inner, w2, weyl_compose
from .mollifier import Mollifier, eta_grid
from .rserror import WedgeEngine, build_approximant, contour_shift_residual, error_exact, error_oracle, sweep

__all__ = [
    "AnalyticGaussian",
    "FieldModel",
    "Frame",
    "GridBump",
    "Lattice",
    "Mollifier",
    "NullBoxBump",
    "Point2",
    "RapidityGrid",
    "Region",
    "TemporalStep",
    "W_L",
    "W_R",
    "WedgeEngine",
    "apply_cutoff",
    "boost_correlation",
    "boost_pullback",
    "build_approximant",
    "causal_complement",
    "causal_completion",
    "coherent_inner",
    "contour_shift_residual",
    "error_exact",
    "error_oracle",
    "eta_grid",
    "on_shell_profile",
    "reflect",
    "relate",
    "select_frame",
    "support_box",
    "sweep",
    "w2",
    "weyl_compose",
]
