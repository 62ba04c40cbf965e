"""Euler-Lagrange operator and the power-iteration extremizer solver.

``T(f)`` is the field with ``<g, T(f)> = Q(g, f, f, f)`` for every ``g``::

    T(f) = C_Q sum_k w_k U_k^* (|u_k|^2 u_k),    u_k = U_k f = e^{i t_k Lap} f

with the inner product conjugate-linear in the first slot.  Pairing with
``g = f`` gives ``<f, T(f)> = omega ||f||^2``.  The ratio ``||U f||_4^4`` is a
convex function of ``f``, so the normalised iteration ``f <- T(f)/||T(f)||``
cannot decrease it; the recorded ``phi_trace`` checks this.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .functional import C_Q, _sampler
from .grid import ComplexField2D, ContractError, Space, TimeQuadrature, _require_space, l2_norm
from .spacetime import SpaceTimeSampler
from .symmetry import BALANCED_VARIANCE, canonicalize

__all__ = [
    "apply_el_operator",
    "omega_of",
    "el_residual",
    "SolverConfig",
    "ExtremizerReport",
    "DivergenceError",
    "power_iterate",
]

log = logging.getLogger(__name__)


class DivergenceError(RuntimeError):
    """The iteration lost ratio for several consecutive steps."""

    def __init__(self, message, phi_trace):
        super().__init__(message)
        self.phi_trace = list(phi_trace)


def _check(f: ComplexField2D, what: str):
    _require_space(f, Space.PHYSICAL, what)
    if f.is_zero():
        raise ContractError(f"{what} needs a nonzero field")


def _apply(s: SpaceTimeSampler, a: np.ndarray):
    """Return ``(T a, ||U a||_4^4)`` from one evolution."""
    u = s.evolve(a)
    dens = u.real**2 + u.imag**2
    quartic = float(np.dot(s.measure, (dens * dens).reshape(len(s), -1).sum(axis=1)))
    return C_Q * s.adjoint(dens * u), quartic


def apply_el_operator(f: ComplexField2D, tq: TimeQuadrature | None = None, *, sampler=None) -> ComplexField2D:
    _check(f, "apply_el_operator")
    s = _sampler(f.grid, tq, sampler)
    return f.with_samples(_apply(s, f.samples)[0])


def omega_of(f: ComplexField2D, tq: TimeQuadrature | None = None, *, sampler=None) -> float:
    """``omega = Q(f, f, f, f) / ||f||^2``."""
    _check(f, "omega_of")
    s = _sampler(f.grid, tq, sampler)
    return C_Q * float(s.quartic_integral(f).real) / l2_norm(f) ** 2


def _residual_parts(s, a, dx2):
    Ta, quartic = _apply(s, a)
    norm2 = float(np.vdot(a, a).real * dx2)
    omega = C_Q * quartic / norm2
    res = float(np.sqrt(np.vdot(Ta - omega * a, Ta - omega * a).real * dx2) / (omega * np.sqrt(norm2)))
    return Ta, omega, quartic / norm2**2, res


def el_residual(f: ComplexField2D, tq: TimeQuadrature | None = None, *, sampler=None) -> float:
    """``||T(f) - omega f|| / (omega ||f||)``; zero exactly at discrete critical points."""
    _check(f, "el_residual")
    s = _sampler(f.grid, tq, sampler)
    return _residual_parts(s, f.samples, f.grid.dx**2)[3]


@dataclass
class SolverConfig:
    max_iter: int = 300
    tol: float = 1e-7
    omega_tol: float = 1e-10
    renormalize_scale: bool = True
    target_variance: float = BALANCED_VARIANCE
    divergence_steps: int = 3
    divergence_drop: float = 1e-6


@dataclass
class ExtremizerReport:
    field: ComplexField2D
    omega: float
    phi: float
    residual: float
    iterations: int
    phi_trace: list = field(default_factory=list)
    residual_trace: list = field(default_factory=list)
    converged: bool = False

    @property
    def sharp_constant_estimate(self) -> float:
        return self.phi**0.25

    def as_dict(self) -> dict:
        return {
            "omega": self.omega,
            "phi": self.phi,
            "sharp_constant_estimate": self.sharp_constant_estimate,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "phi_trace": list(self.phi_trace),
            "residual_trace": list(self.residual_trace),
        }


def power_iterate(f0: ComplexField2D, tq: TimeQuadrature | None = None, cfg: SolverConfig | None = None,
                  *, sampler=None, callback=None) -> ExtremizerReport:
    """Iterate ``f <- T(f)/||T(f)||`` until the Euler-Lagrange residual is small.

    With ``cfg.renormalize_scale`` each iterate is moved back to centre 0,
    momentum 0, focus time 0 and width ``cfg.target_variance``; these are
    symmetries of the ratio, and without them the iterate drifts along the
    symmetry orbit towards widths the grid resolves poorly.

    Stops once the residual is ``<= cfg.tol`` and the relative change in
    ``omega`` is ``<= cfg.omega_tol``, or after ``cfg.max_iter`` steps.
    """
    _check(f0, "power_iterate")
    cfg = cfg or SolverConfig()
    s = _sampler(f0.grid, tq, sampler)
    dx2 = f0.grid.dx**2
    f = f0 * (1.0 / l2_norm(f0))
    if cfg.renormalize_scale:
        f = canonicalize(f, cfg.target_variance)
        f = f * (1.0 / l2_norm(f))
    phi_trace, res_trace = [], []
    omega_prev = None
    drops = 0
    converged = False
    it = 0
    while True:
        Ta, omega, phi, res = _residual_parts(s, f.samples, dx2)
        if phi_trace and phi < phi_trace[-1] * (1.0 - cfg.divergence_drop):
            drops += 1
            if drops >= cfg.divergence_steps:
                raise DivergenceError(
                    f"ratio decreased for {drops} consecutive steps at iteration {it} "
                    f"(phi {phi_trace[-1]:.12g} -> {phi:.12g})", phi_trace + [phi])
        else:
            drops = 0
        phi_trace.append(phi)
        res_trace.append(res)
        if callback is not None:
            callback(it, phi, res)
        settled = omega_prev is not None and abs(omega - omega_prev) <= cfg.omega_tol * abs(omega)
        if res <= cfg.tol and settled:
            converged = True
            break
        if it >= cfg.max_iter:
            break
        omega_prev = omega
        g = f.with_samples(Ta)
        g = g * (1.0 / l2_norm(g))
        if cfg.renormalize_scale:
            g = canonicalize(g, cfg.target_variance)
            g = g * (1.0 / l2_norm(g))
        f = g
        it += 1
    log.info("power iteration: %d steps, phi=%.12g residual=%.3g", it, phi, res)
    return ExtremizerReport(f, omega, phi, res, it, phi_trace, res_trace, converged)
