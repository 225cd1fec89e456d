"""Activation families for coordinate networks, with exact derivatives.

The headline activation is a piecewise quadratic wave: x**2 + 2x on (-2, 0],
-x**2 + 2x on (0, 2), extended periodically with period 4. It is continuous,
has a continuous triangular derivative, and is exactly representable by a
two-term polynomial per branch, which is what makes it cheap in hardware.

Five baseline families are provided for comparison: sine, Gaussian, a
real-valued Gabor wavelet cos(x)*exp(-x**2), a variable-period sine
sin((|x|+1)*x), and sinc. A plain ReLU is included as a training control;
it is not part of the hardware family set.

Frequency scaling (omega0) is applied by the network layer that calls these
functions, never here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import backend


class Family(enum.Enum):
    QUAD = "quad"
    SINE = "sine"
    GAUSSIAN = "gaussian"
    WIRE = "wire"
    FINER = "finer"
    SINC = "sinc"
    RELU = "relu"

    @classmethod
    def parse(cls, name: str) -> "Family":
        key = name.strip().lower()
        aliases = {
            "sin": cls.SINE, "sine": cls.SINE, "siren": cls.SINE,
            "gauss": cls.GAUSSIAN, "gaussian": cls.GAUSSIAN,
            "wire": cls.WIRE, "gabor": cls.WIRE,
            "finer": cls.FINER,
            "sinc": cls.SINC,
            "quad": cls.QUAD, "quadinr": cls.QUAD,
            "relu": cls.RELU,
        }
        if key not in aliases:
            raise ValueError(f"unknown activation family: {name!r}")
        return aliases[key]


# Hardware family set (ReLU is a software-only control).
HARDWARE_FAMILIES = (
    Family.SINE, Family.GAUSSIAN, Family.WIRE,
    Family.FINER, Family.SINC, Family.QUAD,
)

QUAD_PERIOD = 4.0


@dataclass(frozen=True)
class ActivationKind:
    """An activation family plus its scale and analysis range.

    omega0 is the frequency multiplier applied to pre-activations by the
    caller; range_half_width is the half-width of the input interval used
    for polynomial approximation and hardware sizing (1.0 or 2.0).
    """

    family: Family
    omega0: float = 30.0
    range_half_width: float = 2.0

    def __post_init__(self):
        if not (math.isfinite(self.omega0) and self.omega0 > 0):
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.range_half_width not in (1.0, 2.0):
            raise ValueError(
                f"range_half_width must be 1.0 or 2.0, got {self.range_half_width}"
            )


def _check_finite(x):
    if not np.all(np.isfinite(x)):
        raise ValueError("activation input must be finite")


def quad_eval(x):
    """Periodic piecewise quadratic, scalar or array. Result lies in [-1, 1].

    The input is reduced to the representative interval (-2, 2] by
    x - 4*round(x/4) (round half to even), then the branch polynomial is
    applied: w**2 + 2w for w <= 0, -w**2 + 2w for w > 0.
    """
    arr = np.asarray(x, dtype=np.float64)
    _check_finite(arr)
    out = backend.kernels.quad_eval_f64(np.ascontiguousarray(arr.ravel()))
    out = out.reshape(arr.shape)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def quad_grad(x):
    """Derivative of the periodic quadratic: a triangular wave in [-2, 2]."""
    arr = np.asarray(x, dtype=np.float64)
    _check_finite(arr)
    out = backend.kernels.quad_grad_f64(np.ascontiguousarray(arr.ravel()))
    out = out.reshape(arr.shape)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def af_eval(kind: ActivationKind | Family, x):
    """Evaluate an activation family at x (omega0 is NOT applied here)."""
    family = kind.family if isinstance(kind, ActivationKind) else kind
    arr = np.asarray(x, dtype=np.float64)
    _check_finite(arr)
    out = backend.kernels.af_eval_f64(family.value, np.ascontiguousarray(arr.ravel()))
    out = out.reshape(arr.shape)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def af_grad(kind: ActivationKind | Family, x):
    """Exact analytic derivative of ``af_eval`` with respect to x."""
    family = kind.family if isinstance(kind, ActivationKind) else kind
    arr = np.asarray(x, dtype=np.float64)
    _check_finite(arr)
    out = backend.kernels.af_grad_f64(family.value, np.ascontiguousarray(arr.ravel()))
    out = out.reshape(arr.shape)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out
