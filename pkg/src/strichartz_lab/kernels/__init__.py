"""Hot kernels with a compiled backend and a numpy fallback.

The compiled module is used when it was built and ``STRZ_PURE_PYTHON`` is
unset; ``BACKEND`` names the active choice.  Both backends implement:

``circle_sum(xi1, xi2, coef, theta_lo, theta_hi, n_theta, src3, src4, abs_values, mu, eps)``
    ``sum_p coef_p * sum_k dtheta_p g3(c_p + r_p e_k) g4(c_p - r_p e_k) W / 4`` with
    ``c_p = (xi1_p + xi2_p)/2``, ``r_p = |xi1_p - xi2_p|/2``, midpoint nodes on
    ``[theta_lo_p, theta_hi_p]`` and ``W = exp(F(xi1) - F(xi2) - F(xi3) - F(xi4))``
    for ``F = mu|xi|^2/(1 + eps|xi|^2)``.  Sources are tuples
    ``(mode, data, origin, spacing)`` with ``data`` of shape ``(n1, n2)`` and
    ``origin`` a scalar or a pair giving the first coordinate on each axis.
    ``TRIG`` evaluates the discrete-time Fourier sum of physical samples
    (already multiplied by ``dx^2``); ``CELL`` returns the frequency sample
    whose cell contains the point, and 0 outside the block.

``constraint_weights(eta1, eta2, theta, mu, eps)``
    the weight ``W`` on the constraint set parametrised by ``eta1, eta2`` and
    the circle angle ``theta``.
"""
import os

from . import _fallback
from ._fallback import CELL, TRIG

BACKEND = "python"
circle_sum = _fallback.circle_sum
constraint_weights = _fallback.constraint_weights

if not os.environ.get("STRZ_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "compiled"
        circle_sum = _ckernels.circle_sum
        constraint_weights = _ckernels.constraint_weights

__all__ = ["BACKEND", "CELL", "TRIG", "circle_sum", "constraint_weights"]
