# Compiled scalar implementations of the hot kernels. Semantics must match
# _kernels_np exactly: same IEEE-754 single-precision operation order in the
# binary32 helpers (the build disables FP contraction so no FMA sneaks in),
# same formulas in the float64 activation math.

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, fabs, rint, sin
from libc.math cimport fabsf, rintf

cnp.import_array()

BACKEND_NAME = "cython"

ctypedef cnp.float32_t f32
ctypedef cnp.float64_t f64

cdef enum FamilyCode:
    FAM_QUAD = 0
    FAM_SINE = 1
    FAM_GAUSSIAN = 2
    FAM_WIRE = 3
    FAM_FINER = 4
    FAM_SINC = 5
    FAM_RELU = 6

cdef int _family_code(str family) except -1:
    if family == "quad":
        return FAM_QUAD
    if family == "sine":
        return FAM_SINE
    if family == "gaussian":
        return FAM_GAUSSIAN
    if family == "wire":
        return FAM_WIRE
    if family == "finer":
        return FAM_FINER
    if family == "sinc":
        return FAM_SINC
    if family == "relu":
        return FAM_RELU
    raise ValueError(f"unknown activation family: {family}")


cdef inline f64 _quad_wrap(f64 x) nogil:
    cdef f64 w = x - 4.0 * rint(x * 0.25)
    if w <= -2.0:
        w += 4.0
    return w


cdef inline f64 _quad_eval(f64 x) nogil:
    cdef f64 w = _quad_wrap(x)
    if w <= 0.0:
        return w * w + 2.0 * w
    return -w * w + 2.0 * w


cdef inline f64 _quad_grad(f64 x) nogil:
    cdef f64 w = _quad_wrap(x)
    if w <= 0.0:
        return 2.0 * w + 2.0
    return -2.0 * w + 2.0


def quad_eval_f64(const f64[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef f64[::1] out = out_arr
    for i in range(n):
        out[i] = _quad_eval(x[i])
    return out_arr


def quad_grad_f64(const f64[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef f64[::1] out = out_arr
    for i in range(n):
        out[i] = _quad_grad(x[i])
    return out_arr


def af_eval_f64(str family, const f64[::1] x):
    cdef int code = _family_code(family)
    cdef Py_ssize_t i, n = x.shape[0]
    cdef f64 v, z
    out_arr = np.empty(n, dtype=np.float64)
    cdef f64[::1] out = out_arr
    for i in range(n):
        v = x[i]
        if code == FAM_QUAD:
            out[i] = _quad_eval(v)
        elif code == FAM_SINE:
            out[i] = sin(v)
        elif code == FAM_GAUSSIAN:
            out[i] = exp(-v * v)
        elif code == FAM_WIRE:
            out[i] = cos(v) * exp(-v * v)
        elif code == FAM_FINER:
            z = (fabs(v) + 1.0) * v
            out[i] = sin(z)
        elif code == FAM_SINC:
            out[i] = 1.0 if v == 0.0 else sin(v) / v
        else:
            out[i] = v if v > 0.0 else 0.0
    return out_arr


def af_grad_f64(str family, const f64[::1] x):
    cdef int code = _family_code(family)
    cdef Py_ssize_t i, n = x.shape[0]
    cdef f64 v, z
    out_arr = np.empty(n, dtype=np.float64)
    cdef f64[::1] out = out_arr
    for i in range(n):
        v = x[i]
        if code == FAM_QUAD:
            out[i] = _quad_grad(v)
        elif code == FAM_SINE:
            out[i] = cos(v)
        elif code == FAM_GAUSSIAN:
            out[i] = -2.0 * v * exp(-v * v)
        elif code == FAM_WIRE:
            out[i] = exp(-v * v) * (-sin(v) - 2.0 * v * cos(v))
        elif code == FAM_FINER:
            z = (fabs(v) + 1.0) * v
            out[i] = cos(z) * (2.0 * fabs(v) + 1.0)
        elif code == FAM_SINC:
            out[i] = 0.0 if v == 0.0 else cos(v) / v - sin(v) / (v * v)
        else:
            out[i] = 1.0 if v > 0.0 else 0.0
    return out_arr


# ---------------------------------------------------------------------------
# canonical binary32 helpers


cdef inline f32 _quad32_scalar(f32 x, bint wrap) nogil:
    cdef f32 w, k, p, d
    if wrap:
        k = rintf(x * <f32>0.25)
        w = x - <f32>4.0 * k
        if w <= <f32>-2.0:
            w = w + <f32>4.0
    else:
        w = x
    p = w * w
    d = <f32>2.0 * w
    if w <= <f32>0.0:
        return p + d
    return d - p


def quad32(object x, bint wrap):
    arr = np.ascontiguousarray(x, dtype=np.float32)
    flat = arr.ravel()
    cdef const f32[::1] xv = flat
    cdef Py_ssize_t i, n = xv.shape[0]
    out_arr = np.empty(n, dtype=np.float32)
    cdef f32[::1] out = out_arr
    for i in range(n):
        out[i] = _quad32_scalar(xv[i], wrap)
    return out_arr.reshape(arr.shape)


def finer_pre32(object x):
    arr = np.ascontiguousarray(x, dtype=np.float32)
    flat = arr.ravel()
    cdef const f32[::1] xv = flat
    cdef Py_ssize_t i, n = xv.shape[0]
    cdef f32 b
    out_arr = np.empty(n, dtype=np.float32)
    cdef f32[::1] out = out_arr
    for i in range(n):
        b = fabsf(xv[i]) + <f32>1.0
        out[i] = b * xv[i]
    return out_arr.reshape(arr.shape)


def poly32(object x, object degrees, object coeffs):
    arr = np.ascontiguousarray(x, dtype=np.float32)
    flat = arr.ravel()
    cdef const f32[::1] xv = flat
    deg_arr = np.ascontiguousarray(degrees, dtype=np.int64)
    coef_arr = np.ascontiguousarray(coeffs, dtype=np.float32)
    cdef const cnp.int64_t[::1] deg = deg_arr
    cdef const f32[::1] cf = coef_arr
    cdef Py_ssize_t i, j, n = xv.shape[0], m = deg.shape[0]
    cdef cnp.int64_t maxd, d
    if m == 0 or deg[m - 1] > 64 or deg[0] < 0:
        raise ValueError("polynomial degrees must lie in [0, 64]")
    maxd = deg[m - 1]
    cdef bint odd = deg[0] % 2 == 1
    out_arr = np.empty(n, dtype=np.float32)
    cdef f32[::1] out = out_arr
    # pows[k] holds x**k for the parity chain; degrees stay small (<= 64)
    cdef f32 pows[65]
    cdef f32 xval, x2, acc, term
    for i in range(n):
        xval = xv[i]
        pows[1] = xval
        if maxd >= 2:
            x2 = xval * xval
            pows[2] = x2
            if odd and maxd >= 3:
                pows[3] = x2 * xval
                d = 5
            else:
                d = 4
            while d <= maxd:
                pows[d] = pows[d - 2] * x2
                d += 2
        acc = 0.0
        for j in range(m):
            d = deg[j]
            term = cf[j] if d == 0 else cf[j] * pows[d]
            acc = term if j == 0 else acc + term
        out[i] = acc
    return out_arr.reshape(arr.shape)


def af32(str family, object x, object degrees, object coeffs, bint wrap):
    if family == "quad":
        return quad32(x, wrap)
    v = finer_pre32(x) if family == "finer" else x
    return poly32(v, degrees, coeffs)


def linear_strict32(object h, object W, object b):
    h_arr = np.ascontiguousarray(h, dtype=np.float32)
    W_arr = np.ascontiguousarray(W, dtype=np.float32)
    b_arr = np.ascontiguousarray(b, dtype=np.float32)
    cdef const f32[:, ::1] hv = h_arr
    cdef const f32[:, ::1] Wv = W_arr
    cdef const f32[::1] bv = b_arr
    cdef Py_ssize_t n = hv.shape[0], din = hv.shape[1], dout = Wv.shape[1]
    cdef Py_ssize_t width = 1
    while width < din:
        width *= 2
    out_arr = np.empty((n, dout), dtype=np.float32)
    cdef f32[:, ::1] out = out_arr
    lanes_arr = np.zeros(width, dtype=np.float32)
    cdef f32[::1] lanes = lanes_arr
    cdef Py_ssize_t r, j, k, half
    for r in range(n):
        for j in range(dout):
            for k in range(din):
                lanes[k] = hv[r, k] * Wv[k, j]
            for k in range(din, width):
                lanes[k] = 0.0
            half = width
            while half > 1:
                half = half // 2
                for k in range(half):
                    lanes[k] = lanes[2 * k] + lanes[2 * k + 1]
            out[r, j] = lanes[0] + bv[j]
    return out_arr
