# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: circle-reduction quadrature and constraint-set weights."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, exp, fabs, floor, sqrt
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef enum:
    TRIG = 0
    CELL = 1


cdef inline double _wexp(double p1, double p2, double mu, double eps) nogil:
    cdef double r2 = p1 * p1 + p2 * p2
    return mu * r2 / (1.0 + eps * r2)


cdef struct Source:
    int mode
    int n1
    int n2
    const double complex *data
    double *re
    double *im
    double o1
    double o2
    double spacing


cdef inline double complex _eval(Source *s, double p1, double p2, double *work) nogil:
    cdef int n1 = s.n1
    cdef int n2 = s.n2
    cdef int a, b, i1, i2
    cdef double *e1r = work
    cdef double *e1i = work + n1
    cdef double *e2r = work + 2 * n1
    cdef double *e2i = work + 2 * n1 + n2
    cdef const double *fr
    cdef const double *fi
    cdef double rr, ri, accr, acci, s1r, s1i, s2r, s2i
    if s.mode == CELL:
        i1 = <int>floor((p1 - s.o1) / s.spacing + 0.5)
        i2 = <int>floor((p2 - s.o2) / s.spacing + 0.5)
        if i1 < 0 or i1 >= n1 or i2 < 0 or i2 >= n2:
            return 0.0
        return s.data[i1 * n2 + i2]
    # trigonometric (DTFT) evaluation: sum_ab F[a,b] exp(-i (x_a p1 + x_b p2))
    e1r[0] = cos(s.o1 * p1)
    e1i[0] = -sin(s.o1 * p1)
    e2r[0] = cos(s.o2 * p2)
    e2i[0] = -sin(s.o2 * p2)
    s1r = cos(s.spacing * p1)
    s1i = -sin(s.spacing * p1)
    s2r = cos(s.spacing * p2)
    s2i = -sin(s.spacing * p2)
    for a in range(1, n1):
        e1r[a] = e1r[a - 1] * s1r - e1i[a - 1] * s1i
        e1i[a] = e1r[a - 1] * s1i + e1i[a - 1] * s1r
    for b in range(1, n2):
        e2r[b] = e2r[b - 1] * s2r - e2i[b - 1] * s2i
        e2i[b] = e2r[b - 1] * s2i + e2i[b - 1] * s2r
    accr = 0.0
    acci = 0.0
    for a in range(n1):
        fr = s.re + a * n2
        fi = s.im + a * n2
        rr = 0.0
        ri = 0.0
        for b in range(n2):
            rr = rr + fr[b] * e2r[b] - fi[b] * e2i[b]
            ri = ri + fr[b] * e2i[b] + fi[b] * e2r[b]
        accr = accr + e1r[a] * rr - e1i[a] * ri
        acci = acci + e1r[a] * ri + e1i[a] * rr
    return accr + 1j * acci


cdef Source _source(tuple src, object keep):
    cdef Source s
    mode, data, origin, spacing = src
    arr = np.ascontiguousarray(data, dtype=np.complex128)
    re = np.ascontiguousarray(arr.real)
    im = np.ascontiguousarray(arr.imag)
    keep.extend((arr, re, im))
    cdef double complex[:, ::1] view = arr
    cdef double[:, ::1] vre = re
    cdef double[:, ::1] vim = im
    o = np.broadcast_to(np.asarray(origin, dtype=np.float64), (2,))
    s.mode = int(mode)
    s.n1 = arr.shape[0]
    s.n2 = arr.shape[1]
    s.data = &view[0, 0]
    s.re = &vre[0, 0]
    s.im = &vim[0, 0]
    s.o1 = float(o[0])
    s.o2 = float(o[1])
    s.spacing = float(spacing)
    return s


def circle_sum(xi1, xi2, coef, theta_lo, theta_hi, n_theta, tuple src3, tuple src4,
               bint abs_values, double mu, double eps):
    cdef double[:, ::1] k1 = np.ascontiguousarray(xi1, dtype=np.float64)
    cdef double[:, ::1] k2 = np.ascontiguousarray(xi2, dtype=np.float64)
    cdef double complex[::1] cf = np.ascontiguousarray(coef, dtype=np.complex128)
    cdef double[::1] lo = np.ascontiguousarray(theta_lo, dtype=np.float64)
    cdef double[::1] hi = np.ascontiguousarray(theta_hi, dtype=np.float64)
    cdef long long[::1] mth = np.ascontiguousarray(n_theta, dtype=np.int64)
    keep = []
    cdef Source s3 = _source(src3, keep)
    cdef Source s4 = _source(src4, keep)
    cdef int nmax = s3.n1 + s3.n2
    if s4.n1 + s4.n2 > nmax:
        nmax = s4.n1 + s4.n2
    cdef double *work = <double *>malloc(2 * nmax * sizeof(double))
    cdef Py_ssize_t P = cf.shape[0]
    cdef Py_ssize_t p
    cdef long long k, m
    cdef double c1, c2, r, dth, th, o1, o2, w0, expo
    cdef double complex g3, g4, inner, total = 0.0
    try:
        with nogil:
            for p in range(P):
                m = mth[p]
                if m <= 0:
                    continue
                c1 = 0.5 * (k1[p, 0] + k2[p, 0])
                c2 = 0.5 * (k1[p, 1] + k2[p, 1])
                r = 0.5 * sqrt((k1[p, 0] - k2[p, 0]) ** 2 + (k1[p, 1] - k2[p, 1]) ** 2)
                dth = (hi[p] - lo[p]) / m
                if mu != 0.0:
                    w0 = _wexp(k1[p, 0], k1[p, 1], mu, eps) - _wexp(k2[p, 0], k2[p, 1], mu, eps)
                inner = 0.0
                for k in range(m):
                    th = lo[p] + dth * (k + 0.5)
                    o1 = r * cos(th)
                    o2 = r * sin(th)
                    g3 = _eval(&s3, c1 + o1, c2 + o2, work)
                    if g3 == 0.0:
                        continue
                    g4 = _eval(&s4, c1 - o1, c2 - o2, work)
                    if abs_values:
                        g3 = sqrt(g3.real * g3.real + g3.imag * g3.imag)
                        g4 = sqrt(g4.real * g4.real + g4.imag * g4.imag)
                    if mu != 0.0:
                        expo = w0 - _wexp(c1 + o1, c2 + o2, mu, eps) - _wexp(c1 - o1, c2 - o2, mu, eps)
                        inner = inner + g3 * g4 * exp(expo)
                    else:
                        inner = inner + g3 * g4
                total = total + cf[p] * dth * inner
    finally:
        free(work)
    return complex(total * 0.25)


def constraint_weights(eta1, eta2, theta, double mu, double eps):
    cdef double[:, ::1] a = np.ascontiguousarray(eta1, dtype=np.float64)
    cdef double[:, ::1] b = np.ascontiguousarray(eta2, dtype=np.float64)
    cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t S = th.shape[0]
    out = np.empty(S, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double c1, c2, r, d1, d2
    with nogil:
        for i in range(S):
            c1 = 0.5 * (a[i, 0] + b[i, 0])
            c2 = 0.5 * (a[i, 1] + b[i, 1])
            d1 = a[i, 0] - b[i, 0]
            d2 = a[i, 1] - b[i, 1]
            r = 0.5 * sqrt(d1 * d1 + d2 * d2)
            o[i] = exp(_wexp(a[i, 0], a[i, 1], mu, eps) - _wexp(b[i, 0], b[i, 1], mu, eps)
                       - _wexp(c1 + r * cos(th[i]), c2 + r * sin(th[i]), mu, eps)
                       - _wexp(c1 - r * cos(th[i]), c2 - r * sin(th[i]), mu, eps))
    return out
