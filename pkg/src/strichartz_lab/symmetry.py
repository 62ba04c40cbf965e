"""Symmetries of the Strichartz ratio acting on grid fields.

Translation, modulation, parabolic rescaling and time translation leave the
ratio unchanged on ``R^2``; on the grid they hold up to truncation error for
fields localised in both ``x`` and ``xi``.  :func:`canonicalize` uses them to
pin a field to a fixed position, momentum, focus time and width.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ComplexField2D, Space, _fwd, _inv, _require_space, propagate

__all__ = [
    "translate",
    "modulate",
    "rescale",
    "moments",
    "Moments",
    "focus_time",
    "canonicalize",
    "BALANCED_VARIANCE",
]

# <|x|^2> of |exp(-|x|^2/2)|^2; the default target width
BALANCED_VARIANCE = 1.0


def translate(f: ComplexField2D, shift) -> ComplexField2D:
    """``f(x - shift)`` via the Fourier shift theorem."""
    _require_space(f, Space.PHYSICAL, "translate")
    g = f.grid
    k1, k2 = g.mesh(Space.FREQUENCY)
    phase = np.exp(-1j * (k1 * shift[0] + k2 * shift[1]))
    return f.with_samples(_inv(_fwd(f.samples, g.dx) * phase, g.dx))


def modulate(f: ComplexField2D, xi0) -> ComplexField2D:
    """``exp(i x.xi0) f(x)``."""
    _require_space(f, Space.PHYSICAL, "modulate")
    x1, x2 = f.grid.mesh()
    return f.with_samples(f.samples * np.exp(1j * (x1 * xi0[0] + x2 * xi0[1])))


def rescale(f: ComplexField2D, lam: float) -> ComplexField2D:
    """``lam f(lam x)`` (``L^2``-preserving), evaluated by trigonometric interpolation.

    Points with ``|lam x_i| > L`` would read a periodic copy of ``f``; they
    are set to zero instead.
    """
    _require_space(f, Space.PHYSICAL, "rescale")
    g = f.grid
    fh = _fwd(f.samples, g.dx)
    x = g.x
    xi = g.xi
    e = np.exp(1j * lam * np.multiply.outer(x, xi)) * (g.dxi / (2.0 * np.pi))
    e[np.abs(lam * x) > g.half_width] = 0.0
    return f.with_samples(lam * (e @ fh @ e.T))


@dataclass(frozen=True)
class Moments:
    mass: float
    centre: np.ndarray
    momentum: np.ndarray
    variance: float
    frequency_variance: float


def moments(f: ComplexField2D) -> Moments:
    """Centre and spread of ``|f|^2`` and of ``|fhat|^2``."""
    _require_space(f, Space.PHYSICAL, "moments")
    g = f.grid
    px = np.abs(f.samples) ** 2
    pk = np.abs(_fwd(f.samples, g.dx)) ** 2
    x1, x2 = g.mesh()
    k1, k2 = g.mesh(Space.FREQUENCY)
    mx = px.sum()
    mk = pk.sum()
    c = np.array([(x1 * px).sum(), (x2 * px).sum()]) / mx
    p = np.array([(k1 * pk).sum(), (k2 * pk).sum()]) / mk
    var = (((x1 - c[0]) ** 2 + (x2 - c[1]) ** 2) * px).sum() / mx
    kvar = (((k1 - p[0]) ** 2 + (k2 - p[1]) ** 2) * pk).sum() / mk
    return Moments(float(mx * g.dx**2), c, p, float(var), float(kvar))


def focus_time(f: ComplexField2D, probe: float | None = None) -> float:
    """Time at which ``<|x - x(t)|^2>`` of ``e^{itLap} f`` is smallest.

    The centred variance is a quadratic polynomial in ``t``; three samples
    determine it.
    """
    if probe is None:
        probe = 0.05 * f.grid.half_width / f.grid.xi_max
    v = [moments(propagate(f, s)).variance for s in (-probe, 0.0, probe)]
    curv = v[0] - 2.0 * v[1] + v[2]
    if curv <= 0:
        return 0.0
    return float(-0.5 * probe * (v[2] - v[0]) / curv)


def canonicalize(f: ComplexField2D, target_variance: float = BALANCED_VARIANCE,
                 max_time: float | None = None, max_factor: float = 2.0) -> ComplexField2D:
    """Move ``f`` to centre 0, momentum 0, focus time 0 and the target width.

    Each correction is clamped (``max_time`` for the time shift, ``max_factor``
    for the scale change) so a poorly localised iterate is moved gradually.
    """
    m = moments(f)
    f = translate(f, -m.centre)
    f = modulate(f, -m.momentum)
    if max_time is None:
        max_time = f.grid.half_width / (2.0 * f.grid.xi_max)
    t0 = float(np.clip(focus_time(f), -max_time, max_time))
    if t0:
        f = propagate(f, t0)
    var = moments(f).variance
    lam = float(np.clip(np.sqrt(var / target_variance), 1.0 / max_factor, max_factor))
    if abs(lam - 1.0) > 1e-15:
        f = rescale(f, lam)
    return f
