"""Rectangle functional-equation tests and the quadratic log fit.

A quadruple ``(x, y, w, z)`` is a rectangle when ``x + y = w + z`` and
``|x|^2 + |y|^2 = |w|^2 + |z|^2``.  Exponentials of quadratics satisfy
``f(x) f(y) = f(w) f(z)`` on every rectangle; these checks measure how far a
grid field is from that.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import ComplexField2D, ContractError, Space, _fwd, _require_space
from .rng import stream

__all__ = [
    "RectangleQuadruple",
    "RectangleBatch",
    "random_rectangle",
    "random_rectangles",
    "spectral_interpolate",
    "functional_equation_residual",
    "second_difference_test",
    "QuadraticFit",
    "quadratic_log_fit",
    "unwrapped_log",
]

# Dyadic quanta: with these every vertex sum is exact in binary64.
_POINT_QUANTUM = 2.0**-24
_LENGTH_QUANTUM = 2.0**-12
_GUARD = 1e-300


@dataclass(frozen=True)
class RectangleQuadruple:
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    z: np.ndarray

    @classmethod
    def from_edges(cls, a, u, v) -> "RectangleQuadruple":
        """Rectangle with corner ``a`` and perpendicular edges ``u``, ``v``."""
        a, u, v = (np.asarray(p, dtype=float) for p in (a, u, v))
        if abs(u @ v) > 1e-12 * (np.linalg.norm(u) * np.linalg.norm(v) + 1.0):
            raise ContractError("rectangle edges must be perpendicular")
        return cls(a, a + u + v, a + u, a + v)

    def as_arrays(self):
        return tuple(np.asarray(p, dtype=float)[None, :] for p in (self.x, self.y, self.w, self.z))


@dataclass(frozen=True)
class RectangleBatch:
    """``len(x)`` quadruples stored as four ``(n, 2)`` arrays."""
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    z: np.ndarray

    def __len__(self):
        return self.x.shape[0]

    def __getitem__(self, i) -> RectangleQuadruple:
        return RectangleQuadruple(self.x[i], self.y[i], self.w[i], self.z[i])

    def as_arrays(self):
        return self.x, self.y, self.w, self.z


def _as_arrays(quads):
    if isinstance(quads, (RectangleQuadruple, RectangleBatch)):
        return quads.as_arrays()
    parts = [q.as_arrays() for q in quads]
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(4))


def random_rectangles(n: int, center_scale: float = 1.0, edge_scale: float = 1.0,
                      seed: int | None = None, task=0) -> RectangleBatch:
    """Draw ``n`` rectangles: corner ``a``, edge ``u`` and ``v = k u^perp``.

    ``a`` and ``u`` are normal with the given scales and ``k`` is normal with
    scale ``edge_scale / |u|``.  All coordinates are rounded to dyadic
    rationals first, so ``x + y == w + z`` and ``u . v == 0`` hold exactly.
    """
    if center_scale <= 0 or edge_scale <= 0:
        raise ContractError("rectangle scales must be positive")
    rng = stream(seed, task)
    a = np.round(rng.normal(scale=center_scale, size=(n, 2)) / _POINT_QUANTUM) * _POINT_QUANTUM
    u = np.round(rng.normal(scale=edge_scale, size=(n, 2)) / _POINT_QUANTUM) * _POINT_QUANTUM
    un = np.hypot(u[:, 0], u[:, 1])
    un[un == 0] = 1.0
    k = np.round(rng.normal(scale=edge_scale, size=n) / un / _LENGTH_QUANTUM) * _LENGTH_QUANTUM
    v = k[:, None] * np.stack([-u[:, 1], u[:, 0]], axis=1)
    return RectangleBatch(a, a + u + v, a + u, a + v)


def random_rectangle(center_scale: float = 1.0, edge_scale: float = 1.0, seed: int | None = None,
                     task=0) -> RectangleQuadruple:
    return random_rectangles(1, center_scale, edge_scale, seed, task)[0]


def _interp(f: ComplexField2D, pts: np.ndarray, fh=None) -> np.ndarray:
    g = f.grid
    if fh is None:
        fh = _fwd(f.samples, g.dx)
    out = np.empty(pts.shape[0], dtype=np.complex128)
    scale = (g.dxi / (2.0 * np.pi)) ** 2
    for s in range(0, pts.shape[0], 4096):
        p = pts[s:s + 4096]
        e1 = np.exp(1j * np.multiply.outer(p[:, 0], g.xi))
        e2 = np.exp(1j * np.multiply.outer(p[:, 1], g.xi))
        out[s:s + 4096] = np.einsum("pb,pb->p", e1 @ fh, e2) * scale
    return out


def spectral_interpolate(f: ComplexField2D, point) -> complex | np.ndarray:
    """Trigonometric interpolant of ``f`` at ``point`` (shape ``(2,)`` or ``(m, 2)``).

    Exact at grid points and for fields band-limited to the grid.
    """
    _require_space(f, Space.PHYSICAL, "spectral_interpolate")
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    L = f.grid.half_width
    if np.any(pts < -L) or np.any(pts >= L):
        raise ContractError("interpolation point outside [-L, L)^2")
    val = _interp(f, pts)
    return complex(val[0]) if np.ndim(point) == 1 else val


def _inside(f, *pts):
    L = f.grid.half_width
    ok = np.ones(pts[0].shape[0], dtype=bool)
    for p in pts:
        ok &= np.all((p >= -L) & (p < L), axis=1)
    return ok


def _vertex_values(f, quads):
    x, y, w, z = _as_arrays(quads)
    ok = _inside(f, x, y, w, z)
    vals = np.zeros((4, x.shape[0]), dtype=np.complex128)
    if ok.any():
        fh = _fwd(f.samples, f.grid.dx)
        for i, p in enumerate((x, y, w, z)):
            vals[i, ok] = _interp(f, p[ok], fh)
    return (x, y, w, z), vals, ok


def functional_equation_residual(f: ComplexField2D, quads, floor: float = 1e-10) -> dict:
    """Relative defect ``|f(x)f(y) - f(w)f(z)| / (|f(x)f(y)| + |f(w)f(z)|)`` over rectangles.

    Quadruples with a vertex outside the domain or where ``|f| < floor max|f|``
    are skipped and counted.
    """
    _require_space(f, Space.PHYSICAL, "functional_equation_residual")
    _, v, ok = _vertex_values(f, quads)
    ok &= np.all(np.abs(v) >= floor * np.abs(f.samples).max(), axis=0)
    lhs = v[0, ok] * v[1, ok]
    rhs = v[2, ok] * v[3, ok]
    res = np.abs(lhs - rhs) / (np.abs(lhs) + np.abs(rhs) + _GUARD)
    n = int(ok.sum())
    return {
        "rms": float(np.sqrt(np.mean(res**2))) if n else float("nan"),
        "max": float(res.max()) if n else float("nan"),
        "evaluated": n,
        "skipped": int(ok.size - n),
        "residuals": res,
    }


def _unwrapped_phase(f: ComplexField2D, mask: np.ndarray):
    """Phase unwrapped by breadth-first search from the sample nearest the centre.

    Only the connected component of ``mask`` containing the start point is
    reached; the returned boolean array marks it.
    """
    n = f.grid.n_points
    ang = np.angle(f.samples)
    labels, _ = ndimage.label(mask)
    c = n // 2
    start = (c, c)
    if not mask[start]:
        idx = np.argwhere(mask)
        if idx.size == 0:
            raise ContractError("no samples above the floor")
        start = tuple(idx[np.argmin(((idx - c) ** 2).sum(axis=1))])
    comp = labels == labels[start]
    out = np.zeros_like(ang)
    seen = np.zeros_like(comp)
    out[start] = ang[start]
    seen[start] = True
    queue = deque([start])
    while queue:
        i, j = queue.popleft()
        for a, b in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
            if 0 <= a < n and 0 <= b < n and comp[a, b] and not seen[a, b]:
                d = ang[a, b] - out[i, j]
                out[a, b] = out[i, j] + d - 2.0 * np.pi * np.round(d / (2.0 * np.pi))
                seen[a, b] = True
                queue.append((a, b))
    return out, comp


def unwrapped_log(f: ComplexField2D, threshold: float = 1e-6):
    """``log|f| + i arg f`` on the region ``|f| >= threshold max|f|`` connected to the centre.

    Returns ``(logf, region)``; ``logf`` is NaN outside ``region``.
    """
    a = np.abs(f.samples)
    mask = a >= threshold * a.max()
    phase, comp = _unwrapped_phase(f, mask)
    out = np.full(a.shape, np.nan + 0j)
    out[comp] = np.log(a[comp]) + 1j * phase[comp]
    return out, comp


def second_difference_test(f: ComplexField2D, quads, floor: float = 1e-10) -> dict:
    """RMS of ``log f(x) + log f(y) - log f(w) - log f(z)`` with the phase taken mod ``2 pi``.

    Each vertex phase is put on the branch of the unwrapped grid phase at the
    nearest sample; a quadruple is skipped when a vertex's nearest sample is
    not connected to the centre through ``|f| >= floor max|f|``.
    """
    _require_space(f, Space.PHYSICAL, "second_difference_test")
    g = f.grid
    (x, y, w, z), v, ok = _vertex_values(f, quads)
    logf, comp = unwrapped_log(f, floor)
    terms = []
    for p, val in zip((x, y, w, z), v):
        idx = np.clip(np.rint((p + g.half_width) / g.dx).astype(int), 0, g.n_points - 1)
        ok &= comp[idx[:, 0], idx[:, 1]] & (np.abs(val) > 0)
        ref = np.where(ok, logf[idx[:, 0], idx[:, 1]].imag, 0.0)
        ang = np.angle(val)
        ang = ang + 2.0 * np.pi * np.round((ref - ang) / (2.0 * np.pi))
        with np.errstate(divide="ignore"):
            terms.append(np.log(np.abs(val)) + 1j * ang)
    d = terms[0] + terms[1] - terms[2] - terms[3]
    d = d[ok]
    d = d.real + 1j * (d.imag - 2.0 * np.pi * np.round(d.imag / (2.0 * np.pi)))
    n = int(ok.sum())
    return {
        "rms": float(np.sqrt(np.mean(np.abs(d) ** 2))) if n else float("nan"),
        "evaluated": n,
        "skipped": int(ok.size - n),
    }


@dataclass(frozen=True)
class QuadraticFit:
    """``log f ~ A|x|^2 + B.x + C`` plus the non-isotropic parts of the full fit.

    ``anisotropy = |a11 - a22| / |A|`` and ``cross = |a12| / |A|`` where
    ``a12`` is the off-diagonal entry of the symmetric quadratic form.
    """
    A: complex
    B: np.ndarray
    C: complex
    anisotropy: float
    cross: float
    residual_rms: float
    n_points: int

    @property
    def passed_sign(self) -> bool:
        return self.A.real < 0

    def as_dict(self) -> dict:
        return {
            "A": [self.A.real, self.A.imag],
            "B": [[b.real, b.imag] for b in self.B],
            "C": [self.C.real, self.C.imag],
            "anisotropy": self.anisotropy,
            "cross": self.cross,
            "residual_rms": self.residual_rms,
            "n_points": self.n_points,
        }


def quadratic_log_fit(f: ComplexField2D, threshold: float = 1e-6) -> QuadraticFit:
    """Least-squares fit of ``log f`` by a general quadratic over ``|f| >= threshold max|f|``.

    Log-modulus and unwrapped phase are fitted separately on the basis
    ``{1, x1, x2, x1^2, x2^2, x1 x2}`` and recombined.
    """
    _require_space(f, Space.PHYSICAL, "quadratic_log_fit")
    logf, region = unwrapped_log(f, threshold)
    if region.sum() < 100:
        raise ContractError(f"fit region has {int(region.sum())} points; need at least 100")
    x1, x2 = f.grid.mesh()
    p1, p2 = x1[region], x2[region]
    basis = np.stack([np.ones_like(p1), p1, p2, p1**2, p2**2, p1 * p2], axis=1)
    y = logf[region]
    cr = np.linalg.lstsq(basis, y.real, rcond=None)[0]
    ci = np.linalg.lstsq(basis, y.imag, rcond=None)[0]
    c = cr + 1j * ci
    resid = y - basis @ c
    A = 0.5 * (c[3] + c[4])
    scale = abs(A) if A != 0 else 1.0
    return QuadraticFit(
        A=complex(A),
        B=np.array([c[1], c[2]]),
        C=complex(c[0]),
        anisotropy=float(abs(c[3] - c[4]) / scale),
        cross=float(abs(0.5 * c[5]) / scale),
        residual_rms=float(np.sqrt(np.mean(np.abs(resid) ** 2))),
        n_points=int(region.sum()),
    )
