"""Bilinear interaction of frequency-separated waves.

For ``h1`` supported in ``|xi| <= s`` and ``h2`` in ``|xi| >= N s`` the
product of the two evolutions is small in ``L^2_{t,x}``:
``||u1 u2|| <= C N^{-1/2} ||h1|| ||h2||``.  This module builds such pairs and
measures the ratio by two routes.

``time``
    space-time sampling of both evolutions (any grid fields, needs the
    evolutions to stay inside the box on the torus part of the quadrature).
``cells``
    ``||u1 u2||^2 = Q(h1, h2, h1, h2) / C_Q`` evaluated on the frequency side
    with ``h`` read as constant on each grid cell.  Each cell of the outer
    sum is split into ``subcells^2`` points, the circle is only traversed
    where it meets the support of the inner factors, and lookups are
    nearest-cell.  Cost depends on the support sizes, not on ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .decay import WeightParams, spectral_norm
from .functional import C_Q, _sampler, circle_sum_fields
from .grid import (ComplexField2D, ContractError, Grid2D, Space, TimeQuadrature, _require_compatible,
                   _require_space, inverse_transform)
from .rng import stream

__all__ = [
    "SeparatedPair",
    "separated_pair",
    "bilinear_norm",
    "bilinear_ratio",
    "SweepResult",
    "decay_sweep",
    "mf_estimate",
]

ROUTES = ("time", "cells")


@dataclass(frozen=True)
class SeparatedPair:
    h_low: ComplexField2D
    h_high: ComplexField2D
    s: float
    N: float
    direction: float

    def as_dict(self) -> dict:
        return {"s": self.s, "N": self.N, "direction": self.direction, "grid": self.h_low.grid.as_dict()}


def _unit(grid, samples):
    return ComplexField2D(grid, Space.FREQUENCY, samples / spectral_norm(samples, grid))


def separated_pair(grid: Grid2D, s: float, N: float, seed: int) -> SeparatedPair:
    """Flat random-phase spectra on ``|xi| <= s`` and on a disc of radius ``s``
    centred at distance ``(N + 1) s`` in a random direction.

    Every sample of the high part has ``|xi| >= N s``.  Both parts have unit
    norm (``||h|| = ||h^vee||``).
    """
    if not (s > 0 and N > 1):
        raise ContractError("need s > 0 and N > 1")
    if not N * s < 0.8 * grid.xi_max:
        raise ContractError(f"separation N s = {N * s:g} exceeds 0.8 xi_max = {0.8 * grid.xi_max:g}")
    if (N + 2) * s >= grid.xi_max - grid.dxi:
        raise ContractError("high-frequency disc does not fit inside the frequency grid")
    rng = stream(seed, f"separated-pair:{s!r}:{N!r}")
    k1, k2 = grid.mesh(Space.FREQUENCY)
    n = grid.n_points
    phase_low = np.exp(2j * np.pi * rng.random((n, n)))
    phase_high = np.exp(2j * np.pi * rng.random((n, n)))
    direction = float(rng.uniform(0.0, 2.0 * np.pi))
    c = (N + 1) * s * np.array([np.cos(direction), np.sin(direction)])
    low = k1**2 + k2**2 <= s * s
    high = (k1 - c[0]) ** 2 + (k2 - c[1]) ** 2 <= s * s
    if not low.any() or not high.any():
        raise ContractError("support disc contains no grid samples; refine the frequency grid")
    return SeparatedPair(_unit(grid, np.where(low, phase_low, 0)), _unit(grid, np.where(high, phase_high, 0)),
                         float(s), float(N), direction)


def _block(h: ComplexField2D):
    """Smallest index block holding the nonzero samples, as a ``CELL`` source."""
    g = h.grid
    nz = np.argwhere(h.samples != 0)
    (a0, b0), (a1, b1) = nz.min(axis=0), nz.max(axis=0) + 1
    xi = g.xi
    src = (kernels.CELL, np.ascontiguousarray(h.samples[a0:a1, b0:b1]), (xi[a0], xi[b0]), g.dxi)
    pts = np.stack([xi[nz[:, 0]], xi[nz[:, 1]]], axis=1)
    centre = 0.5 * (pts.min(axis=0) + pts.max(axis=0))
    radius = np.sqrt(((pts - centre) ** 2).sum(axis=1)).max() + g.dxi / np.sqrt(2.0)
    return src, centre, radius


def _subpoints(h: ComplexField2D, q: int):
    g = h.grid
    nz = np.argwhere(h.samples != 0)
    xi = g.xi
    pts = np.stack([xi[nz[:, 0]], xi[nz[:, 1]]], axis=1)
    off = g.dxi * ((np.arange(q) + 0.5) / q - 0.5)
    o1, o2 = np.meshgrid(off, off, indexing="ij")
    o = np.stack([o1.ravel(), o2.ravel()], axis=1)
    sub = (pts[:, None, :] + o[None, :, :]).reshape(-1, 2)
    vals = np.repeat(h.samples[nz[:, 0], nz[:, 1]], q * q)
    return sub, vals * (g.dxi / q) ** 2


def _arc(c, r, d, rho, flip):
    """Angular window where ``c + r e(theta)`` (or ``c - r e(theta)`` if ``flip``) is within ``rho`` of ``d``."""
    v = c - d
    dist = np.hypot(v[:, 0], v[:, 1])
    phi = np.arctan2(v[:, 1], v[:, 0]) + (np.pi if flip else 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = (rho * rho - dist**2 - r**2) / (2.0 * r * dist)
    kappa = np.where(dist * r > 0, kappa, np.where(np.maximum(dist, r) <= rho, 1.0, -2.0))
    alpha = np.arccos(np.clip(kappa, -1.0, 1.0))
    lo = phi + alpha
    width = 2.0 * (np.pi - alpha)
    width = np.where(kappa >= 1.0, 2.0 * np.pi, np.where(kappa < -1.0, 0.0, width))
    return lo, width


def _cells_q(h1, h2, h3, h4, q: int, oversample: float):
    g = h1.grid
    p1, a1 = _subpoints(h1, q)
    p2, a2 = _subpoints(h2, q)
    i, j = np.meshgrid(np.arange(len(p1)), np.arange(len(p2)), indexing="ij")
    xi1, xi2 = p1[i.ravel()], p2[j.ravel()]
    coef = np.conj(a1[i.ravel()] * a2[j.ravel()])
    s3, d3, rho3 = _block(h3)
    s4, d4, rho4 = _block(h4)
    c = 0.5 * (xi1 + xi2)
    r = 0.5 * np.hypot(xi1[:, 0] - xi2[:, 0], xi1[:, 1] - xi2[:, 1])
    lo3, w3 = _arc(c, r, d3, rho3, False)
    lo4, w4 = _arc(c, r, d4, rho4, True)
    use3 = w3 <= w4
    lo = np.where(use3, lo3, lo4)
    width = np.where(use3, w3, w4)
    m = np.where(width > 0, np.maximum(16, np.ceil(r * width * oversample / g.dxi)), 0).astype(np.int64)
    return kernels.circle_sum(xi1, xi2, coef, lo, lo + width, m, s3, s4, False, 0.0, 0.0)


def _time_sq(h1, h2, tq, sampler):
    g = h1.grid
    s = _sampler(g, tq, sampler)
    u1 = s.evolve(inverse_transform(h1))
    u2 = s.evolve(inverse_transform(h2))
    prod = u1 * u2
    dens = (prod.real**2 + prod.imag**2).reshape(len(s), -1).sum(axis=1)
    return float(np.dot(s.measure, dens))


def bilinear_norm(h1: ComplexField2D, h2: ComplexField2D, tq: TimeQuadrature | None = None, *,
                  route: str = "time", subcells: int = 3, oversample: float = 8.0, sampler=None) -> float:
    """``||e^{itLap} h1^vee  e^{itLap} h2^vee||`` in ``L^2_{t,x}``.

    Accepts physical or frequency fields.  The ``cells`` route averages the
    two slot orders so the result is symmetric in ``h1, h2`` bit for bit.
    """
    if route not in ROUTES:
        raise ContractError(f"unknown route {route!r}; expected one of {ROUTES}")
    _require_compatible(h1, h2)
    from .grid import forward_transform
    h1 = forward_transform(h1) if h1.space == Space.PHYSICAL else h1
    h2 = forward_transform(h2) if h2.space == Space.PHYSICAL else h2
    if h1.is_zero() or h2.is_zero():
        return 0.0
    if route == "time":
        return float(np.sqrt(_time_sq(h1, h2, tq, sampler)))
    a = _cells_q(h1, h2, h1, h2, subcells, oversample)
    b = _cells_q(h2, h1, h2, h1, subcells, oversample)
    return float(np.sqrt(max(0.5 * (a.real + b.real), 0.0) / C_Q))


def bilinear_ratio(h1, h2, tq=None, **kw) -> float:
    """``bilinear_norm / (||h1|| ||h2||)``."""
    g = h1.grid
    return bilinear_norm(h1, h2, tq, **kw) / (spectral_norm(h1.samples, g) * spectral_norm(h2.samples, g))


@dataclass(frozen=True)
class SweepResult:
    rows: list
    slope: float
    intercept: float
    s: float

    def table(self) -> list[tuple]:
        """``(N, ratio, seed)`` rows, one per seed."""
        return [(r["N"], v, sd) for r in self.rows for sd, v in zip(r["seeds"], r["ratios"])]

    def in_window(self, lo: float = -0.75, hi: float = -0.45) -> bool:
        return lo <= self.slope <= hi

    def as_dict(self) -> dict:
        return {"s": self.s, "slope": self.slope, "intercept": self.intercept, "rows": self.rows,
                "window": [-0.75, -0.45], "in_window": self.in_window()}


def decay_sweep(grid: Grid2D, s: float, N_list, seeds, tq: TimeQuadrature | None = None, *,
                route: str = "cells", **kw) -> SweepResult:
    """Worst-case (max over seeds) bilinear ratio per ``N`` and the log-log slope."""
    N_list = [float(N) for N in N_list]
    seeds = list(seeds)
    if len(N_list) < 4:
        raise ContractError("a decay fit needs at least 4 values of N")
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ContractError("N values must be strictly increasing")
    if len(seeds) < 3:
        raise ContractError("need at least 3 seeds per N")
    rows = []
    for N in N_list:
        ratios = []
        for sd in seeds:
            pair = separated_pair(grid, s, N, sd)
            ratios.append(bilinear_ratio(pair.h_low, pair.h_high, tq, route=route, **kw))
        if not np.all(np.isfinite(ratios)):
            raise ContractError(f"non-finite bilinear ratio at N={N}")
        rows.append({"N": N, "ratio": float(max(ratios)), "ratios": [float(v) for v in ratios], "seeds": seeds})
    slope, intercept = np.polyfit(np.log([r["N"] for r in rows]), np.log([r["ratio"] for r in rows]), 1)
    return SweepResult(rows, float(slope), float(intercept), float(s))


def mf_estimate(h1, h2, h3, h4, p: WeightParams, **kw) -> dict:
    """Weighted and unweighted multilinear integrals of ``|h1| |h2| |h3| |h4|`` on the constraint set.

    The weighted one carries ``exp(F(xi1) - F(xi2) - F(xi3) - F(xi4))``;
    both use the circle-reduction quadrature (small grids only).
    """
    fs = (h1, h2, h3, h4)
    for f in fs:
        _require_space(f, Space.FREQUENCY, "mf_estimate")
    _require_compatible(*fs)
    from .functional import CIRCLE_MAX_POINTS
    if h1.grid.n_points > CIRCLE_MAX_POINTS:
        raise ContractError(f"mf_estimate is limited to n <= {CIRCLE_MAX_POINTS}")
    if any(f.is_zero() for f in fs):
        return {"weighted": 0.0, "unweighted": 0.0, **p.as_dict()}
    un = circle_sum_fields(fs, absolute=True, **kw)[0].real
    w = un if p.mu == 0 else circle_sum_fields(fs, absolute=True, mu=p.mu, eps=p.eps, **kw)[0].real
    return {"weighted": float(w), "unweighted": float(un), **p.as_dict()}
