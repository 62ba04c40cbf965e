"""Frequency weights, cutoffs, the weighted tail norm and the decay fit.

Frequency-side ``L^2`` norms here use the Plancherel-normalised measure
``d xi / (2 pi)^2``, so ``||fhat|| = ||f||`` and a unit-norm field has unit
spectrum.  The weight is ``F(xi) = mu |xi|^2 / (1 + eps |xi|^2)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .grid import ComplexField2D, ContractError, Space, _require_space, forward_transform, l2_norm
from .rng import stream

__all__ = [
    "WeightParams",
    "weight_f",
    "FrequencySplit",
    "frequency_split",
    "spectral_norm",
    "weighted_tail_norm",
    "direct_weighted_tail_norm",
    "tail_norm_sweep",
    "DecayFit",
    "fit_gaussian_decay",
    "GAnalysis",
    "g_function",
    "g_function_analysis",
    "split_norm_bounds",
    "constraint_weight_check",
]


@dataclass(frozen=True)
class WeightParams:
    mu: float
    eps: float = 0.0
    s: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.mu) and np.isfinite(self.eps)) or self.mu < 0 or self.eps < 0:
            raise ContractError(f"weight parameters must be finite and >= 0, got mu={self.mu}, eps={self.eps}")

    @classmethod
    def for_cutoff(cls, s: float, eps: float = 0.0) -> "WeightParams":
        """The default ``mu = s^-4`` tied to the cutoff ``s``."""
        return cls(float(s) ** -4, eps, float(s))

    def as_dict(self) -> dict:
        return {"mu": self.mu, "eps": self.eps, "s": self.s}


def weight_f(xi, p: WeightParams):
    """``F(xi)`` for one point (shape ``(2,)``) or an array of points (shape ``(..., 2)``)."""
    xi = np.asarray(xi, dtype=float)
    r2 = xi[..., 0] ** 2 + xi[..., 1] ** 2
    out = p.mu * r2 / (1.0 + p.eps * r2)
    return float(out) if out.ndim == 0 else out


def _freq(h: ComplexField2D) -> ComplexField2D:
    return forward_transform(h) if h.space == Space.PHYSICAL else h


def spectral_norm(samples: np.ndarray, grid) -> float:
    """``L^2`` norm of frequency samples in the measure ``d xi / (2 pi)^2``."""
    return float(np.sqrt(np.vdot(samples, samples).real) * grid.dxi / (2.0 * np.pi))


@dataclass(frozen=True)
class FrequencySplit:
    """``h = h_low2 + h_mid + h_high`` split at ``|xi| = s`` and ``|xi| = s^2``."""
    s: float
    h_low2: ComplexField2D
    h_mid: ComplexField2D
    h_high: ComplexField2D

    def norms(self) -> dict:
        g = self.h_mid.grid
        return {k: spectral_norm(getattr(self, k).samples, g) for k in ("h_low2", "h_mid", "h_high")}


def _masks(grid, s):
    r = np.sqrt(grid.radius_squared(Space.FREQUENCY))
    low = r < s
    high = r > s * s
    return low, ~(low | high), high


def frequency_split(h: ComplexField2D, s: float) -> FrequencySplit:
    _require_space(h, Space.FREQUENCY, "frequency_split")
    if not s > 1:
        raise ContractError(f"cutoff s must exceed 1, got {s}")
    low, mid, high = _masks(h.grid, s)
    parts = [h.with_samples(np.where(m, h.samples, 0)) for m in (low, mid, high)]
    return FrequencySplit(float(s), *parts)


def _weighted_tail_sq(fh, s, p):
    g = fh.grid
    xi = np.stack(g.mesh(Space.FREQUENCY), axis=-1)
    tail = np.sqrt(g.radius_squared(Space.FREQUENCY)) >= s * s
    w = np.exp(weight_f(xi[tail], p))
    return spectral_norm(w * fh.samples[tail], g)


def weighted_tail_norm(fhat: ComplexField2D, s: float, p: WeightParams) -> float:
    """``H = ||exp(F) fhat 1_{|xi| >= s^2}||``."""
    _require_space(fhat, Space.FREQUENCY, "weighted_tail_norm")
    return _weighted_tail_sq(fhat, s, p)


def direct_weighted_tail_norm(fhat: ComplexField2D, s: float, mu: float) -> float:
    """The ``eps = 0`` limit ``||exp(mu |xi|^2) fhat 1_{|xi| >= s^2}||``."""
    return weighted_tail_norm(fhat, s, WeightParams(mu, 0.0))


def tail_norm_sweep(fhat: ComplexField2D, s: float, mu: float, eps_list) -> list[tuple[float, float]]:
    """``(eps, H(eps))`` rows in the order given."""
    return [(float(e), weighted_tail_norm(fhat, s, WeightParams(mu, float(e)))) for e in eps_list]


@dataclass(frozen=True)
class DecayFit:
    mu_fit: float
    intercept: float
    r_squared: float
    annulus: tuple
    n_samples: int

    def as_dict(self) -> dict:
        return {"mu_fit": self.mu_fit, "intercept": self.intercept, "r_squared": self.r_squared,
                "annulus": list(self.annulus), "n_samples": self.n_samples}


def fit_gaussian_decay(fhat: ComplexField2D, annulus=None, floor: float = 1e-13,
                       min_samples: int = 30) -> DecayFit:
    """Fit ``log|fhat| = intercept - mu_fit |xi|^2`` over an annulus.

    The default annulus is ``2 <= |xi| <= 0.8 xi_max``.  Samples with
    ``|fhat| < floor max|fhat|`` are dropped.
    """
    _require_space(fhat, Space.FREQUENCY, "fit_gaussian_decay")
    g = fhat.grid
    if annulus is None:
        annulus = (2.0, 0.8 * g.xi_max)
    r2 = g.radius_squared(Space.FREQUENCY)
    a = np.abs(fhat.samples)
    if a.max() == 0:
        raise ContractError("no samples above the floor")
    keep = (r2 >= annulus[0] ** 2) & (r2 <= annulus[1] ** 2) & (a >= floor * a.max())
    n = int(keep.sum())
    if n == 0:
        raise ContractError("no samples above the floor")
    if n < min_samples:
        raise ContractError(f"only {n} usable samples in the annulus; need {min_samples}")
    x = r2[keep]
    y = np.log(a[keep])
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_sq = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return DecayFit(float(-slope), float(intercept), float(min(max(r_sq, 0.0), 1.0)),
                    (float(annulus[0]), float(annulus[1])), n)


def g_function(x, omega: float, C: float):
    """``G(x) = omega x / 2 - C x^2 - C x^3``."""
    return 0.5 * omega * x - C * x**2 - C * x**3


@dataclass(frozen=True)
class GAnalysis:
    omega: float
    C: float
    M: float
    x_crit: float
    x0: float
    x1: float

    def as_dict(self) -> dict:
        return {"omega": self.omega, "C": self.C, "M": self.M, "x_crit": self.x_crit,
                "x0": self.x0, "x1": self.x1}


def g_function_analysis(omega: float, C: float) -> GAnalysis:
    """Maximum of ``G`` on ``[0, inf)`` and the two solutions of ``G = M/2``.

    ``G'(x) = omega/2 - 2Cx - 3Cx^2`` has the positive root
    ``x = omega / (2C + sqrt(4C^2 + 6 C omega))`` (rationalised form of the
    quadratic formula, free of cancellation).  ``G`` is concave on
    ``[0, inf)``, so the level ``M/2`` is crossed once on each side.
    """
    if not (omega > 0 and C > 0):
        raise ContractError("omega and C must be positive")
    x_crit = omega / (2.0 * C + np.sqrt(4.0 * C * C + 6.0 * C * omega))
    M = float(g_function(x_crit, omega, C))
    h = lambda x: g_function(x, omega, C) - 0.5 * M
    hi = 2.0 * x_crit
    while h(hi) > 0:
        hi *= 2.0
    x0 = brentq(h, 0.0, x_crit, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    x1 = brentq(h, x_crit, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return GAnalysis(float(omega), float(C), M, float(x_crit), float(x0), float(x1))


def split_norm_bounds(f: ComplexField2D, s: float, mu: float, eps: float = 0.0) -> dict:
    """The three cutoff bounds for ``h = exp(F) fhat`` and a unit-norm ``f``.

    ``||h_<|| <= e^{mu s^4}``, ``||h_<<|| <= e^{mu s^2}`` and
    ``||h_~|| <= e^{mu s^4} ||f_~||``, where ``<`` means ``|xi| < s^2``,
    ``<<`` means ``|xi| < s`` and ``~`` means ``s <= |xi| <= s^2``.
    """
    if abs(l2_norm(f) - 1.0) > 1e-10:
        raise ContractError("split_norm_bounds expects a unit-norm field")
    fh = _freq(f)
    g = fh.grid
    p = WeightParams(mu, eps, s)
    xi = np.stack(g.mesh(Space.FREQUENCY), axis=-1)
    h = np.exp(weight_f(xi, p)) * fh.samples
    low, mid, _ = _masks(g, s)
    below = low | mid
    below &= np.sqrt(g.radius_squared(Space.FREQUENCY)) < s * s
    rows = {
        "h_lt": (spectral_norm(h[below], g), float(np.exp(mu * s**4))),
        "h_ll": (spectral_norm(h[low], g), float(np.exp(mu * s**2))),
        "h_mid": (spectral_norm(h[mid], g), float(np.exp(mu * s**4)) * spectral_norm(fh.samples[mid], g)),
    }
    out = {k: {"lhs": a, "rhs": b, "slack": b - a, "holds": bool(a <= b)} for k, (a, b) in rows.items()}
    out["all_hold"] = all(v["holds"] for v in out.values() if isinstance(v, dict))
    out["s"] = float(s)
    out["mu"] = float(mu)
    return out


def constraint_weight_check(p: WeightParams, n_samples: int, seed: int, scale: float | None = None,
                            task="constraint-weights") -> dict:
    """Largest ``exp(F(eta1) - F(eta2) - F(eta3) - F(eta4))`` over random constraint points.

    ``eta1, eta2`` are normal with standard deviation ``scale`` (default
    ``2 / sqrt(mu)``, or 10 when ``mu = 0``) and ``eta3, eta4`` sit at a
    uniform angle on the circle through them, so both constraints hold.
    """
    if n_samples < 1:
        raise ContractError("n_samples must be >= 1")
    if scale is None:
        scale = 2.0 / np.sqrt(p.mu) if p.mu > 0 else 10.0
    rng = stream(seed, task)
    eta1 = rng.normal(scale=scale, size=(n_samples, 2))
    eta2 = rng.normal(scale=scale, size=(n_samples, 2))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n_samples)
    w = kernels.constraint_weights(eta1, eta2, theta, p.mu, p.eps)
    i = int(np.argmax(w))
    return {"max_weight": float(w[i]), "min_weight": float(w.min()), "n_samples": int(n_samples),
            "argmax": {"eta1": eta1[i].tolist(), "eta2": eta2[i].tolist(), "theta": float(theta[i])},
            **p.as_dict()}
