"""Weak Killing spinors on left-invariant metrics X^3(K, L, M) of S^3."""

from .geometry import ModelParams, curvature
from .moduli import km_locus, solve_for_L, trace, trace_variety
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig
from .wk_core import (
    calibrate_conventions,
    integrable_wk_number,
    solve_wk_numbers,
    variety_F,
    verify,
    wk_number,
)

__all__ = [
    "DEFAULT_TOLERANCES",
    "ModelParams",
    "ToleranceConfig",
    "calibrate_conventions",
    "curvature",
    "integrable_wk_number",
    "km_locus",
    "solve_for_L",
    "solve_wk_numbers",
    "trace",
    "trace_variety",
    "variety_F",
    "verify",
    "wk_number",
]
