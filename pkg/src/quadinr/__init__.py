"""quadinr: implicit neural representations with a piecewise quadratic
activation, plus the hardware cost model for its activation pipeline and a
behavioral accelerator simulator."""

__version__ = "0.1.0"

from .activations import ActivationKind, Family, af_eval, af_grad, quad_eval, quad_grad

__all__ = [
    "__version__",
    "ActivationKind",
    "Family",
    "af_eval",
    "af_grad",
    "quad_eval",
    "quad_grad",
]
