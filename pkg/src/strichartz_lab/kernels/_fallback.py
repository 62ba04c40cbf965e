"""Pure numpy versions of the hot kernels.

Both backends share one contract; see :mod:`strichartz_lab.kernels`.
"""
import numpy as np

TRIG = 0
CELL = 1

_CHUNK_POINTS = 1 << 16


def _weight_exponent(p, mu, eps):
    r2 = p[..., 0] ** 2 + p[..., 1] ** 2
    return mu * r2 / (1.0 + eps * r2)


def _origin(origin):
    o = np.broadcast_to(np.asarray(origin, dtype=np.float64), (2,))
    return float(o[0]), float(o[1])


def _evaluate(mode, data, origin, spacing, p):
    """Interpolate a source at points ``p`` of shape ``(m, 2)``."""
    n1, n2 = data.shape
    o1, o2 = _origin(origin)
    if mode == TRIG:
        e1 = np.exp(-1j * np.multiply.outer(p[:, 0], o1 + spacing * np.arange(n1)))
        e2 = np.exp(-1j * np.multiply.outer(p[:, 1], o2 + spacing * np.arange(n2)))
        return np.einsum("pb,pb->p", e1 @ data, e2)
    i1 = np.floor((p[:, 0] - o1) / spacing + 0.5).astype(np.int64)
    i2 = np.floor((p[:, 1] - o2) / spacing + 0.5).astype(np.int64)
    ok = (i1 >= 0) & (i1 < n1) & (i2 >= 0) & (i2 < n2)
    out = np.zeros(p.shape[0], dtype=np.complex128)
    out[ok] = data[i1[ok], i2[ok]]
    return out


def circle_sum(xi1, xi2, coef, theta_lo, theta_hi, n_theta, src3, src4, abs_values, mu, eps):
    total = 0.0 + 0.0j
    n_theta = np.asarray(n_theta, dtype=np.int64)
    for m in np.unique(n_theta):
        if m <= 0:
            continue
        sel = np.flatnonzero(n_theta == m)
        per_chunk = max(1, _CHUNK_POINTS // int(m))
        for start in range(0, sel.size, per_chunk):
            idx = sel[start:start + per_chunk]
            total += _chunk(xi1[idx], xi2[idx], coef[idx], theta_lo[idx], theta_hi[idx], int(m),
                            src3, src4, abs_values, mu, eps)
    return complex(total)


def _chunk(xi1, xi2, coef, lo, hi, m, src3, src4, abs_values, mu, eps):
    c = 0.5 * (xi1 + xi2)
    r = 0.5 * np.hypot(xi1[:, 0] - xi2[:, 0], xi1[:, 1] - xi2[:, 1])
    dtheta = (hi - lo) / m
    theta = lo[:, None] + dtheta[:, None] * (np.arange(m)[None, :] + 0.5)
    off = np.stack([r[:, None] * np.cos(theta), r[:, None] * np.sin(theta)], axis=-1)
    p3 = (c[:, None, :] + off).reshape(-1, 2)
    p4 = (c[:, None, :] - off).reshape(-1, 2)
    g3 = _evaluate(*src3, p3)
    g4 = _evaluate(*src4, p4)
    if abs_values:
        g3 = np.abs(g3)
        g4 = np.abs(g4)
    val = (g3 * g4).reshape(-1, m)
    if mu != 0.0:
        expo = (_weight_exponent(xi1, mu, eps) - _weight_exponent(xi2, mu, eps))[:, None] \
            - _weight_exponent(p3, mu, eps).reshape(-1, m) - _weight_exponent(p4, mu, eps).reshape(-1, m)
        val = val * np.exp(expo)
    return np.sum(coef * dtheta * val.sum(axis=1)) * 0.25


def constraint_weights(eta1, eta2, theta, mu, eps):
    c = 0.5 * (eta1 + eta2)
    d = eta1 - eta2
    r = 0.5 * np.hypot(d[:, 0], d[:, 1])
    off = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
    eta3 = c + off
    eta4 = c - off
    expo = _weight_exponent(eta1, mu, eps) - _weight_exponent(eta2, mu, eps) \
        - _weight_exponent(eta3, mu, eps) - _weight_exponent(eta4, mu, eps)
    return np.exp(expo)
