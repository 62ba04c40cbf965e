"""The Strichartz ratio, the quadrilinear form ``Q`` and the dual-norm identity.

Convention constant.  With ``delta(xi) = (2 pi)^-d int exp(i xi.x) dx``::

    delta(a) delta(b) = (2 pi)^-3 int int exp(i a.x + i b t) dx dt

Substituting into ``Q`` and using ``(2 pi)^2 u_j(t, x) = int exp(i x.xi + i t|xi|^2) fhat_j``
(after the measure-preserving change ``(t, x) -> (-t, -x)``) gives::

    Q(f1, f2, f3, f4) = (2 pi)^-3 (2 pi)^8 int int conj(u1 u2) u3 u4 dx dt,

i.e. ``C_Q = (2 pi)^5``.  The circle reduction below evaluates ``Q`` directly in
frequency space and confirms this constant independently.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import enum

import numpy as np

from . import kernels
from .grid import (
    ComplexField2D,
    ContractError,
    Grid2D,
    Space,
    TimeQuadrature,
    _require_compatible,
    _require_space,
    forward_transform,
    inverse_transform,
    l2_norm,
)
from .spacetime import SpaceTimeSampler

__all__ = [
    "C_Q",
    "Route",
    "QuadForm",
    "RatioReport",
    "strichartz_ratio",
    "l4_spacetime_norm",
    "quadrilinear_time_domain",
    "quadrilinear_circle_reduction",
    "circle_pairs",
    "circle_sum_fields",
    "gaussian_ratio_closed_form",
    "dual_symmetry_check",
    "DUAL_CONSTANT",
]

C_Q = (2.0 * np.pi) ** 5

# ||e^{itLap} f||_4 = 2 pi ||e^{itLap} f^vee||_4, from the far-field factorisation
DUAL_CONSTANT = 2.0 * np.pi

CIRCLE_MAX_POINTS = 32


class Route(str, enum.Enum):
    TIME_DOMAIN = "TimeDomain"
    CIRCLE_REDUCTION = "CircleReduction"
    GAUSSIAN_CLOSED_FORM = "GaussianClosedForm"


@dataclass(frozen=True)
class QuadForm:
    value: complex
    route: Route
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "route": self.route.value, **self.meta}


@dataclass(frozen=True)
class RatioReport:
    phi: float
    sharp_constant_estimate: float
    grid: dict = field(default_factory=dict)
    quadrature: dict = field(default_factory=dict)
    route: str = Route.TIME_DOMAIN.value

    def as_dict(self) -> dict:
        return {
            "phi": self.phi,
            "sharp_constant_estimate": self.sharp_constant_estimate,
            "grid": self.grid,
            "quadrature": self.quadrature,
            "route": self.route,
        }


def _sampler(grid, tq, sampler):
    if sampler is not None:
        if sampler.grid != grid:
            raise ContractError("sampler grid does not match the field grid")
        return sampler
    if tq is None:
        raise ContractError("a time quadrature is required")
    return SpaceTimeSampler(grid, tq)


def l4_spacetime_norm(f: ComplexField2D, tq: TimeQuadrature | None = None, *, sampler=None) -> float:
    """``||e^{itLap} f||_{L^4_{t,x}}`` by quadrature in ``t`` and grid sums in ``x``."""
    _require_space(f, Space.PHYSICAL, "l4_spacetime_norm")
    s = _sampler(f.grid, tq, sampler)
    return float(max(s.quartic_integral(f).real, 0.0) ** 0.25)


def strichartz_ratio(f: ComplexField2D, tq: TimeQuadrature | None = None, *, sampler=None) -> RatioReport:
    """``Phi(f) = ||e^{itLap} f||_4^4 / ||f||_2^4`` and the estimate ``Phi^(1/4)`` of the sharp constant."""
    _require_space(f, Space.PHYSICAL, "strichartz_ratio")
    if f.is_zero():
        raise ContractError("the Strichartz ratio is undefined for the zero field")
    s = _sampler(f.grid, tq, sampler)
    phi = float(s.quartic_integral(f).real) / l2_norm(f) ** 4
    return RatioReport(phi, phi**0.25, f.grid.as_dict(), s.tq.as_dict(), Route.TIME_DOMAIN.value)


def quadrilinear_time_domain(f1, f2, f3, f4, tq: TimeQuadrature | None = None, *, sampler=None) -> QuadForm:
    """``Q(f1, f2, f3, f4) = C_Q int int conj(u1 u2) u3 u4 dx dt``."""
    fs = (f1, f2, f3, f4)
    for f in fs:
        _require_space(f, Space.PHYSICAL, "quadrilinear_time_domain")
    _require_compatible(*fs)
    s = _sampler(f1.grid, tq, sampler)
    if f1 is f2 is f3 is f4:
        value = C_Q * s.quartic_integral(f1).real + 0j
    else:
        value = C_Q * s.quartic_integral(*fs)
    return QuadForm(complex(value), Route.TIME_DOMAIN, {"grid": f1.grid.as_dict(), "quadrature": s.tq.as_dict()})


def _trig_source(fh: ComplexField2D):
    g = fh.grid
    phys = inverse_transform(fh).samples * g.dx**2
    return kernels.TRIG, phys, -g.half_width, g.dx


def _cell_source(fh: ComplexField2D):
    g = fh.grid
    return kernels.CELL, fh.samples, -g.xi_max, g.dxi


def _support_radius(fh: ComplexField2D, floor: float = 1e-15) -> float:
    """Radius of the physical region where the field exceeds ``floor * max``."""
    phys = np.abs(inverse_transform(fh).samples)
    top = phys.max()
    if top == 0:
        return 0.0
    r = np.sqrt(fh.grid.radius_squared())
    return float(r[phys > floor * top].max()) + fh.grid.dx


def circle_pairs(h1: ComplexField2D, h2: ComplexField2D, *, absolute: bool = False, prune: float = 0.0):
    """Frequency pairs ``(xi1, xi2)`` and weights ``conj(h1 h2) dxi^4`` for the outer sum.

    Exact zeros are always dropped; ``prune > 0`` also drops pairs below
    ``prune * max|weight|``.
    """
    g = h1.grid
    k1, k2 = g.mesh(Space.FREQUENCY)
    pts = np.stack([k1.ravel(), k2.ravel()], axis=1)
    a1 = h1.samples.ravel()
    a2 = h2.samples.ravel()
    if absolute:
        a1 = np.abs(a1)
        a2 = np.abs(a2)
    i1 = np.flatnonzero(a1)
    i2 = np.flatnonzero(a2)
    w = np.conj(np.multiply.outer(a1[i1], a2[i2])) * g.dxi**4
    mag = np.abs(w)
    keep = mag > prune * mag.max() if (prune > 0 and mag.size) else mag > 0
    r, c = np.nonzero(keep)
    return pts[i1[r]], pts[i2[c]], w[r, c]


def angular_nodes(r: np.ndarray, radius: float, minimum: int = 12) -> np.ndarray:
    """Trapezoid node counts resolving the angular bandwidth ``2 r R`` on the circle."""
    z = np.asarray(r) * radius
    m = np.ceil(2.0 * z + 6.0 * np.cbrt(z) + minimum).astype(np.int64)
    return m + (m % 2)


def circle_sum_fields(fs, *, absolute: bool = False, mu: float = 0.0, eps: float = 0.0,
                      prune: float = 0.0, n_theta: int | None = None):
    """Circle-reduction sum for four frequency fields; returns ``(value, n_pairs)``.

    ``absolute`` replaces every factor by its modulus and ``mu, eps`` switch
    on the weight ``exp(F(xi1) - F(xi2) - F(xi3) - F(xi4))``.
    """
    f1h, f2h, f3h, f4h = fs
    xi1, xi2, coef = circle_pairs(f1h, f2h, absolute=absolute, prune=prune)
    r = 0.5 * np.hypot(xi1[:, 0] - xi2[:, 0], xi1[:, 1] - xi2[:, 1])
    if n_theta is None:
        radius = max(_support_radius(f3h), _support_radius(f4h))
        m = angular_nodes(r, radius)
    else:
        m = np.full(r.shape, int(n_theta), dtype=np.int64)
    lo = np.zeros_like(r)
    hi = np.full_like(r, 2.0 * np.pi)
    value = kernels.circle_sum(xi1, xi2, coef, lo, hi, m, _trig_source(f3h), _trig_source(f4h),
                               absolute, float(mu), float(eps))
    return value, int(coef.size)


def quadrilinear_circle_reduction(f1h, f2h, f3h, f4h, *, prune: float = 0.0,
                                  n_theta: int | None = None) -> QuadForm:
    """``Q`` from frequency samples with both delta constraints resolved analytically.

    For fixed ``(xi1, xi2)`` the resonant ``xi3`` lie on the circle of centre
    ``(xi1 + xi2)/2`` and radius ``r = |xi1 - xi2|/2``; writing
    ``xi3 = c + rho e(theta)`` the energy constraint is ``2(r^2 - rho^2)`` and
    ``delta(2(r^2 - rho^2)) rho drho dtheta = dtheta / 4``.  Values of
    ``f3hat``, ``f4hat`` off the grid come from trigonometric interpolation
    (the discrete Fourier sum of the physical samples), and the angular
    integral uses the periodic trapezoid rule with enough nodes to resolve
    its bandwidth unless ``n_theta`` fixes the count.
    """
    fs = (f1h, f2h, f3h, f4h)
    for f in fs:
        _require_space(f, Space.FREQUENCY, "quadrilinear_circle_reduction")
    _require_compatible(*fs)
    g = f1h.grid
    if g.n_points > CIRCLE_MAX_POINTS:
        raise ContractError(f"circle reduction is limited to n <= {CIRCLE_MAX_POINTS} (got {g.n_points})")
    meta = {"grid": g.as_dict(), "backend": kernels.BACKEND}
    if any(f.is_zero() for f in fs):
        return QuadForm(0j, Route.CIRCLE_REDUCTION, meta)
    value, pairs = circle_sum_fields(fs, prune=prune, n_theta=n_theta)
    meta["pairs"] = pairs
    return QuadForm(complex(value), Route.CIRCLE_REDUCTION, meta)


def gaussian_ratio_closed_form(a: float) -> float:
    """``Phi`` of ``exp(-a|x|^2)``, evaluated analytically.

    For ``f = exp(-a|x|^2)``: ``fhat = (pi/a) exp(-|xi|^2/4a)`` and, per axis,
    ``u = (1 - 4iat)^(-1/2) exp(-a x^2 / (1 - 4iat))``.  Hence in 2D::

        |u|^2 = (1 + 16 a^2 t^2)^-1 exp(-2a|x|^2 / (1 + 16 a^2 t^2))
        int |u|^4 dx = pi / (4a (1 + 16 a^2 t^2))
        int int |u|^4 dx dt = pi/(4a) * pi/(4a) = pi^2 / (16 a^2)
        ||f||_2^4 = (pi / 2a)^2 = pi^2 / (4 a^2)

    so ``Phi = 1/4`` for every ``a`` and the sharp constant is ``2^(-1/2)``.
    """
    a = float(a)
    if not a > 0:
        raise ContractError("the Gaussian exponent a must be positive")
    # pi^2/(16 a^2) divided by pi^2/(4 a^2); a cancels exactly
    return 0.25


def _dual_field(f: ComplexField2D) -> ComplexField2D:
    """``f^vee``: the samples of ``f`` read as a frequency function, inverted on the dual grid."""
    dual = f.grid.dual()
    return inverse_transform(ComplexField2D(dual, Space.FREQUENCY, f.samples))


def moment_time_scale(f: ComplexField2D) -> float:
    """``(1/2) sqrt(<|x - x0|^2> / <|xi - xi0|^2>)``: the dispersion time of ``f``.

    Equal to ``1/(4a)`` for ``exp(-a|x|^2)``.
    """
    g = f.grid
    px = np.abs(f.samples) ** 2
    pk = np.abs(forward_transform(f).samples) ** 2
    return 0.5 * np.sqrt(_centred_second_moment(g, px, Space.PHYSICAL) / _centred_second_moment(g, pk, Space.FREQUENCY))


def _centred_second_moment(g: Grid2D, density, space):
    a1, a2 = g.mesh(space)
    mass = density.sum()
    m1 = (a1 * density).sum() / mass
    m2 = (a2 * density).sum() / mass
    return float((((a1 - m1) ** 2 + (a2 - m2) ** 2) * density).sum() / mass)


def dual_symmetry_check(f: ComplexField2D, tq: TimeQuadrature, *, adapt_scale: bool = True) -> dict:
    """Compare ``||e^{itLap} f||_4`` with ``||e^{itLap} f^vee||_4``.

    ``f^vee`` lives on the dual grid (spatial step ``pi/L``).  The time
    quadrature keeps its scheme and node count; with ``adapt_scale`` its
    scale is matched to each field's dispersion time.  The ratio should be
    ``2 pi`` for every ``f``.
    """
    _require_space(f, Space.PHYSICAL, "dual_symmetry_check")
    if f.is_zero():
        raise ContractError("dual symmetry check needs a nonzero field")
    fv = _dual_field(f)
    tq_f = tq.rescaled(moment_time_scale(f)) if adapt_scale else tq
    tq_v = tq.rescaled(moment_time_scale(fv)) if adapt_scale else tq
    lhs = l4_spacetime_norm(f, tq_f)
    rhs = l4_spacetime_norm(fv, tq_v)
    return {"lhs": lhs, "rhs": rhs, "ratio": lhs / rhs}
