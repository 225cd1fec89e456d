"""Vectorized numpy implementations of the hot kernels.

This module is the import-time fallback when the compiled extension is not
available, and it doubles as the independent second route in bit-exactness
tests: every binary32 helper here performs the same IEEE-754 operations in
the same order as the compiled kernels, just vectorized instead of scalar.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

_F32 = np.float32


# ---------------------------------------------------------------------------
# float64 activation evaluation


def quad_eval_f64(x: np.ndarray) -> np.ndarray:
    w = x - 4.0 * np.rint(x * 0.25)
    w = np.where(w <= -2.0, w + 4.0, w)
    return np.where(w <= 0.0, w * w + 2.0 * w, -w * w + 2.0 * w)


def quad_grad_f64(x: np.ndarray) -> np.ndarray:
    w = x - 4.0 * np.rint(x * 0.25)
    w = np.where(w <= -2.0, w + 4.0, w)
    return np.where(w <= 0.0, 2.0 * w + 2.0, -2.0 * w + 2.0)


def af_eval_f64(family: str, x: np.ndarray) -> np.ndarray:
    if family == "quad":
        return quad_eval_f64(x)
    if family == "sine":
        return np.sin(x)
    if family == "gaussian":
        return np.exp(-x * x)
    if family == "wire":
        return np.cos(x) * np.exp(-x * x)
    if family == "finer":
        return np.sin((np.abs(x) + 1.0) * x)
    if family == "sinc":
        safe = np.where(x == 0.0, 1.0, x)
        return np.where(x == 0.0, 1.0, np.sin(safe) / safe)
    if family == "relu":
        return np.maximum(x, 0.0)
    raise ValueError(f"unknown activation family: {family}")


def af_grad_f64(family: str, x: np.ndarray) -> np.ndarray:
    if family == "quad":
        return quad_grad_f64(x)
    if family == "sine":
        return np.cos(x)
    if family == "gaussian":
        return -2.0 * x * np.exp(-x * x)
    if family == "wire":
        return np.exp(-x * x) * (-np.sin(x) - 2.0 * x * np.cos(x))
    if family == "finer":
        return np.cos((np.abs(x) + 1.0) * x) * (2.0 * np.abs(x) + 1.0)
    if family == "sinc":
        safe = np.where(x == 0.0, 1.0, x)
        return np.where(x == 0.0, 0.0, np.cos(safe) / safe - np.sin(safe) / (safe * safe))
    if family == "relu":
        return (x > 0.0).astype(np.float64)
    raise ValueError(f"unknown activation family: {family}")


# ---------------------------------------------------------------------------
# canonical binary32 helpers (operation order is part of the contract)


def quad32(x: np.ndarray, wrap: bool) -> np.ndarray:
    """Two-stage quadratic branch evaluation in binary32.

    With ``wrap`` the input is first range-reduced by w = x - 4*rint(x/4)
    (mapping -2 to +2); without it the branch polynomial is applied to the
    raw input, matching the two-stage hardware module.
    """
    x = np.asarray(x, dtype=_F32)
    if wrap:
        k = np.rint(x * _F32(0.25), dtype=_F32)
        w = (x - _F32(4.0) * k).astype(_F32)
        w = np.where(w <= _F32(-2.0), (w + _F32(4.0)).astype(_F32), w)
    else:
        w = x
    p = (w * w).astype(_F32)
    d = (_F32(2.0) * w).astype(_F32)
    return np.where(w <= _F32(0.0), (p + d).astype(_F32), (d - p).astype(_F32))


def finer_pre32(x: np.ndarray) -> np.ndarray:
    """z = (|x| + 1) * x with each step rounded to binary32."""
    x = np.asarray(x, dtype=_F32)
    b = (np.abs(x) + _F32(1.0)).astype(_F32)
    return (b * x).astype(_F32)


def poly32(x: np.ndarray, degrees: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Evaluate a single-parity polynomial in binary32, pipeline order.

    Powers are generated by repeated multiplication with x**2 (prepending
    x**3 for odd series), each term is one coefficient multiply, and terms
    are summed in ascending degree order. Every intermediate rounds to
    binary32 exactly as the stage-by-stage hardware walk does.
    """
    x = np.asarray(x, dtype=_F32)
    degrees = [int(d) for d in degrees]
    coeffs = np.asarray(coeffs, dtype=_F32)
    if not degrees or degrees[-1] > 64 or degrees[0] < 0:
        raise ValueError("polynomial degrees must lie in [0, 64]")
    pows = {1: x}
    maxd = degrees[-1]
    if maxd >= 2:
        x2 = (x * x).astype(_F32)
        pows[2] = x2
        start = 3 if degrees[0] % 2 else 4
        if start == 3 and maxd >= 3:
            pows[3] = (x2 * x).astype(_F32)
        d = start + 2 if start == 3 else start
        while d <= maxd:
            pows[d] = (pows[d - 2] * x2).astype(_F32)
            d += 2
    acc = None
    for d, c in zip(degrees, coeffs):
        term = np.full_like(x, c) if d == 0 else (c * pows[d]).astype(_F32)
        acc = term if acc is None else (acc + term).astype(_F32)
    return acc


def af32(family: str, x: np.ndarray, degrees, coeffs, wrap: bool) -> np.ndarray:
    """Binary32 activation as the accelerator datapath computes it."""
    if family == "quad":
        return quad32(x, wrap)
    v = finer_pre32(x) if family == "finer" else np.asarray(x, dtype=_F32)
    return poly32(v, degrees, coeffs)


def linear_strict32(h: np.ndarray, W: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Affine layer in strict binary32 with adjacent-pair tree reduction.

    Lane products are padded with +0.0 to the next power of two and folded
    pairwise ((a0+a1), (a2+a3), ...) until one value remains, then the bias
    is added. One output neuron per pass, batch vectorized.
    """
    h = np.ascontiguousarray(h, dtype=_F32)
    W = np.ascontiguousarray(W, dtype=_F32)
    b = np.ascontiguousarray(b, dtype=_F32)
    n, din = h.shape
    dout = W.shape[1]
    width = 1
    while width < din:
        width *= 2
    out = np.empty((n, dout), dtype=_F32)
    for j in range(dout):
        prods = np.zeros((n, width), dtype=_F32)
        np.multiply(h, W[:, j], out=prods[:, :din])
        while prods.shape[1] > 1:
            prods = (prods[:, 0::2] + prods[:, 1::2]).astype(_F32)
        out[:, j] = (prods[:, 0] + b[j]).astype(_F32)
    return out
