"""Numerical laboratory for extremizers of the 2D Schrodinger Strichartz inequality.

The package computes maximisers of ``||e^{itLap} f||_{L^4_{t,x}} / ||f||_2``
by power iteration on the Euler-Lagrange equation, and checks the structural
facts around them: quadrilinear-form identities, frequency-separated
bilinear decay, Gaussian decay of the spectrum and the rectangle functional
equation that singles out Gaussians.
"""
from .grid import (ComplexField2D, ContractError, Grid2D, QuadratureScheme, Space, TimeQuadrature,
                   forward_transform, gaussian_field, inner, inverse_transform, l2_norm, propagate)
from .functional import (C_Q, DUAL_CONSTANT, QuadForm, RatioReport, dual_symmetry_check,
                         gaussian_ratio_closed_form, l4_spacetime_norm, quadrilinear_circle_reduction,
                         quadrilinear_time_domain, strichartz_ratio)
from .euler_lagrange import (DivergenceError, ExtremizerReport, SolverConfig, apply_el_operator, el_residual,
                             omega_of, power_iterate)

__version__ = "0.1.0"

__all__ = [
    "ComplexField2D", "ContractError", "Grid2D", "QuadratureScheme", "Space", "TimeQuadrature",
    "forward_transform", "gaussian_field", "inner", "inverse_transform", "l2_norm", "propagate",
    "C_Q", "DUAL_CONSTANT", "QuadForm", "RatioReport", "dual_symmetry_check", "gaussian_ratio_closed_form",
    "l4_spacetime_norm", "quadrilinear_circle_reduction", "quadrilinear_time_domain", "strichartz_ratio",
    "DivergenceError", "ExtremizerReport", "SolverConfig", "apply_el_operator", "el_residual", "omega_of",
    "power_iterate", "__version__",
]
