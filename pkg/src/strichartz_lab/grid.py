"""Periodic grids, complex fields, Fourier transforms and the free propagator.

Fourier convention (kept verbatim everywhere in the package)::

    fhat(xi) = int exp(-i x.xi) f(x) dx
    f(x)     = (2 pi)^-2 int exp(+i x.xi) fhat(xi) dxi
    e^{it Lap} f(x) = (2 pi)^-2 int exp(i x.xi + i t |xi|^2) fhat(xi) dxi

so that ``||fhat||_2^2 = (2 pi)^2 ||f||_2^2``.  The propagator phase is
``e^{+it|xi|^2}``; norms are insensitive to the sign of ``t``.

The physical grid is ``x_m = -L + m dx`` and the frequency grid is
``xi_j = -xi_max + j dxi``; both are stored in natural (monotone) order.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "Grid2D",
    "Space",
    "ComplexField2D",
    "ContractError",
    "TimeQuadrature",
    "QuadratureScheme",
    "forward_transform",
    "inverse_transform",
    "propagate",
    "gaussian_field",
    "l2_norm",
    "inner",
]


class ContractError(ValueError):
    """Raised when an operation is called outside its documented domain."""


class Space(enum.IntEnum):
    PHYSICAL = 0
    FREQUENCY = 1


@dataclass(frozen=True)
class Grid2D:
    """Uniform periodic grid on ``[-L, L)^2`` with ``n_points`` samples per axis."""

    n_points: int
    half_width: float

    def __post_init__(self):
        n = self.n_points
        if int(n) != n or n < 8 or n % 2:
            raise ContractError(f"n_points must be an even integer >= 8, got {n!r}")
        if not np.isfinite(self.half_width) or self.half_width <= 0:
            raise ContractError(f"half_width must be positive, got {self.half_width!r}")
        object.__setattr__(self, "n_points", int(n))
        object.__setattr__(self, "half_width", float(self.half_width))

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n_points

    @property
    def dxi(self) -> float:
        return np.pi / self.half_width

    @property
    def xi_max(self) -> float:
        return np.pi / self.dx

    @property
    def x(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.n_points)

    @property
    def xi(self) -> np.ndarray:
        return -self.xi_max + self.dxi * np.arange(self.n_points)

    def mesh(self, space: Space = Space.PHYSICAL):
        """Coordinate arrays ``(X1, X2)`` with ``X1`` varying along axis 0."""
        axis = self.x if space == Space.PHYSICAL else self.xi
        return np.meshgrid(axis, axis, indexing="ij")

    def radius_squared(self, space: Space = Space.PHYSICAL) -> np.ndarray:
        a1, a2 = self.mesh(space)
        return a1 * a1 + a2 * a2

    def cell_area(self, space: Space = Space.PHYSICAL) -> float:
        return self.dx**2 if space == Space.PHYSICAL else self.dxi**2

    def dual(self) -> "Grid2D":
        """Grid whose frequency spacing equals this grid's spatial spacing."""
        return Grid2D(self.n_points, np.pi / self.dx)

    def as_dict(self) -> dict:
        return {"n_points": self.n_points, "half_width": self.half_width}


@dataclass(frozen=True, eq=False)
class ComplexField2D:
    """Complex samples of a function on a :class:`Grid2D`.

    ``samples`` has shape ``(n, n)`` in C order (second axis fastest) and is
    made read-only on construction.
    """

    grid: Grid2D
    space: Space
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.grid.n_points
        arr = np.array(self.samples, dtype=np.complex128, order="C", copy=True)
        if arr.size != n * n:
            raise ContractError(f"expected {n * n} samples, got {arr.size}")
        arr = arr.reshape(n, n)
        if not np.all(np.isfinite(arr)):
            raise ContractError("field samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "space", Space(self.space))
        object.__setattr__(self, "samples", arr)

    def with_samples(self, samples) -> "ComplexField2D":
        return ComplexField2D(self.grid, self.space, samples)

    def __mul__(self, scalar) -> "ComplexField2D":
        return self.with_samples(self.samples * scalar)

    __rmul__ = __mul__

    def __add__(self, other: "ComplexField2D") -> "ComplexField2D":
        _require_compatible(self, other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other: "ComplexField2D") -> "ComplexField2D":
        _require_compatible(self, other)
        return self.with_samples(self.samples - other.samples)

    def is_zero(self) -> bool:
        return not np.any(self.samples)


def _require_space(f: ComplexField2D, space: Space, what: str):
    if f.space != space:
        raise ContractError(f"{what} expects a {space.name.lower()}-space field, got {f.space.name.lower()}")


def _require_compatible(*fields: ComplexField2D):
    first = fields[0]
    for other in fields[1:]:
        if other.grid != first.grid:
            raise ContractError("fields live on different grids")
        if other.space != first.space:
            raise ContractError("fields live in different spaces")


# raw transforms on arrays in natural order; x = 0 and xi = 0 sit at index n/2

def _fwd(a: np.ndarray, dx: float) -> np.ndarray:
    axes = (-2, -1)
    return np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(a, axes=axes)), axes=axes) * (dx * dx)


def _inv(a: np.ndarray, dx: float) -> np.ndarray:
    axes = (-2, -1)
    return np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(a, axes=axes)), axes=axes) / (dx * dx)


def forward_transform(f: ComplexField2D) -> ComplexField2D:
    """Discrete ``fhat(xi_j) = sum_m exp(-i x_m.xi_j) f(x_m) dx^2``."""
    _require_space(f, Space.PHYSICAL, "forward_transform")
    return ComplexField2D(f.grid, Space.FREQUENCY, _fwd(f.samples, f.grid.dx))


def inverse_transform(g: ComplexField2D) -> ComplexField2D:
    """Exact inverse of :func:`forward_transform`."""
    _require_space(g, Space.FREQUENCY, "inverse_transform")
    return ComplexField2D(g.grid, Space.PHYSICAL, _inv(g.samples, g.grid.dx))


def propagate(f: ComplexField2D, t: float) -> ComplexField2D:
    """Free Schroedinger evolution ``e^{it Lap} f`` on the periodic grid."""
    _require_space(f, Space.PHYSICAL, "propagate")
    t = float(t)
    if not np.isfinite(t):
        raise ContractError("propagation time must be finite")
    if t == 0.0:
        return f
    phase = np.exp(1j * t * f.grid.radius_squared(Space.FREQUENCY))
    return f.with_samples(_inv(_fwd(f.samples, f.grid.dx) * phase, f.grid.dx))


def gaussian_field(grid: Grid2D, A: complex, B=(0.0, 0.0), C: complex = 0.0) -> ComplexField2D:
    """Samples of ``exp(A|x|^2 + B.x + C)``; requires ``Re(A) < 0``."""
    A = complex(A)
    if not A.real < 0:
        raise ContractError(f"Re(A) must be negative for a decaying Gaussian, got {A}")
    b1, b2 = (complex(b) for b in B)
    x1, x2 = grid.mesh()
    return ComplexField2D(grid, Space.PHYSICAL, np.exp(A * (x1 * x1 + x2 * x2) + b1 * x1 + b2 * x2 + complex(C)))


def l2_norm(f: ComplexField2D) -> float:
    """``L^2`` norm with the measure of the field's own space (``dx^2`` or ``dxi^2``)."""
    a = f.samples
    return float(np.sqrt(np.sum(a.real**2 + a.imag**2) * f.grid.cell_area(f.space)))


def inner(g: ComplexField2D, f: ComplexField2D) -> complex:
    """``<g, f> = int conj(g) f``; conjugate-linear in the first slot."""
    _require_compatible(g, f)
    return complex(np.vdot(g.samples, f.samples) * g.grid.cell_area(g.space))


class QuadratureScheme(str, enum.Enum):
    TANGENT_MAPPED_LEGENDRE = "TangentMappedLegendre"
    UNIFORM_TRUNCATED = "UniformTruncated"


@dataclass(frozen=True, eq=False)
class TimeQuadrature:
    """Nodes and positive weights for ``int_R dt``.

    Build with :meth:`tangent_legendre` (default) or :meth:`uniform_truncated`.
    """

    nodes: np.ndarray
    weights: np.ndarray
    scheme: QuadratureScheme
    scale: float = 1.0
    t_max: float | None = None

    def __post_init__(self):
        t = np.asarray(self.nodes, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if t.ndim != 1 or t.shape != w.shape or t.size < 9:
            raise ContractError("need matching node/weight arrays with at least 9 entries")
        if np.any(np.diff(t) <= 0) or np.any(w <= 0) or not np.all(np.isfinite(t)):
            raise ContractError("nodes must increase strictly and weights must be positive")
        if np.max(np.abs(t + t[::-1])) > 1e-14 * max(1.0, np.max(np.abs(t))):
            raise ContractError("nodes must be symmetric about t = 0")
        t.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "nodes", t)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "scheme", QuadratureScheme(self.scheme))

    def __len__(self):
        return self.nodes.size

    @classmethod
    def tangent_legendre(cls, n_nodes: int = 129, scale: float = 0.5) -> "TimeQuadrature":
        """Gauss-Legendre in ``theta`` on ``(-pi/2, pi/2)`` with ``t = scale * tan(theta)``.

        ``scale`` should be of the order of the dispersion time of the data;
        for ``exp(-a|x|^2)`` the integrand is constant in ``theta`` when
        ``scale = 1/(4a)``.
        """
        if scale <= 0:
            raise ContractError("time scale must be positive")
        z, wz = leggauss(int(n_nodes))
        z = 0.5 * (z - z[::-1])
        wz = 0.5 * (wz + wz[::-1])
        theta = 0.5 * np.pi * z
        nodes = scale * np.tan(theta)
        weights = 0.5 * np.pi * wz * scale / np.cos(theta) ** 2
        return cls(nodes, weights, QuadratureScheme.TANGENT_MAPPED_LEGENDRE, scale=float(scale))

    @classmethod
    def uniform_truncated(cls, n_nodes: int = 129, t_max: float = 10.0) -> "TimeQuadrature":
        """Trapezoid rule on ``[-t_max, t_max]``; ignores the tail beyond ``t_max``."""
        if t_max <= 0:
            raise ContractError("t_max must be positive")
        n = int(n_nodes)
        nodes = np.linspace(-t_max, t_max, n)
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = np.full(n, 2.0 * t_max / (n - 1))
        weights[[0, -1]] *= 0.5
        return cls(nodes, weights, QuadratureScheme.UNIFORM_TRUNCATED, scale=1.0, t_max=float(t_max))

    def rescaled(self, scale: float) -> "TimeQuadrature":
        """Same scheme and node count with a different time scale."""
        if self.scheme == QuadratureScheme.TANGENT_MAPPED_LEGENDRE:
            return TimeQuadrature.tangent_legendre(len(self), scale)
        return TimeQuadrature.uniform_truncated(len(self), self.t_max * scale / self.scale)

    def as_dict(self) -> dict:
        d = {"scheme": self.scheme.value, "n_nodes": len(self), "scale": self.scale}
        if self.t_max is not None:
            d["t_max"] = self.t_max
        return d
