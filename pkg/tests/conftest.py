import importlib.resources

import numpy as np
import pytest

from quadinr import nets
from quadinr.activations import Family


@pytest.fixture(scope="session")
def crop_image() -> np.ndarray:
    """The bundled 64x64 test crop as float64 in [0, 1]."""
    from quadinr.imageio import read_ppm

    ref = importlib.resources.files("quadinr").joinpath("data/crop64.ppm")
    with importlib.resources.as_file(ref) as path:
        return read_ppm(path)


@pytest.fixture(scope="session")
def crop_path(tmp_path_factory):
    ref = importlib.resources.files("quadinr").joinpath("data/crop64.ppm")
    out = tmp_path_factory.mktemp("data") / "crop64.ppm"
    out.write_bytes(ref.read_bytes())
    return out


def small_model(family: Family, seed: int, dims=(2, 8, 8, 3), omega0=1.5) -> nets.MlpModel:
    """A <=200 parameter model in float64, suitable for gradient checks.

    omega0 stays moderate so the central-difference oracle's truncation
    error (which grows with the cube of the composed slope) sits safely
    below the 1e-7 absolute tolerance floor.
    """
    return nets.clone_model(nets.init_params(list(dims), family, omega0, omega0, seed))


_KINK_PERIOD = {Family.QUAD: 2.0}   # curvature breaks at even pre-activations
_KINK_AT_ZERO = {Family.FINER, Family.RELU}


def kink_clearance(model: nets.MlpModel, coords) -> float:
    """Distance from every activated pre-activation to the nearest curvature
    break of the model's family (inf for smooth families).

    Central differences are a valid gradient oracle only when no
    perturbation can push a pre-activation across such a break.
    """
    if model.family in _KINK_PERIOD:
        period = _KINK_PERIOD[model.family]
    elif model.family in _KINK_AT_ZERO:
        period = None
    else:
        return float("inf")
    clear = float("inf")
    h = np.asarray(coords, dtype=np.float64)
    for i in range(model.n_layers - 1):
        u = model.layer_omega0(i) * (h @ model.weights[i] + model.biases[i])
        if period is None:
            d = np.abs(u)
        else:
            d = np.abs(u - period * np.rint(u / period))
        clear = min(clear, float(np.min(d)))
        h = nets._act(model.family, u, np.float64)
    return clear


def gradcheck_model(family: Family, seed: int, coords, margin: float = 1e-3,
                    **kwargs) -> nets.MlpModel:
    """small_model with a deterministic redraw until every pre-activation
    clears the family's curvature breaks by ``margin``."""
    attempt = seed
    while True:
        model = small_model(family, attempt, **kwargs)
        if kink_clearance(model, coords) > margin:
            return model
        attempt += 10007  # deterministic alternate stream


def fd_gradient_slack(model: nets.MlpModel, coords, targets, step=1e-4,
                      rel=1e-4, abs_tol=1e-7) -> float:
    """Worst-case violation of |fd - grad| <= max(rel*|fd|, abs_tol) over all
    parameters; negative values mean every parameter passes."""
    loss, w_grads, b_grads = nets.backward(model, coords, targets, dtype=np.float64)
    worst = -np.inf
    for li in range(model.n_layers):
        for arr, grads in ((model.weights[li], w_grads[li]),
                           (model.biases[li], b_grads[li])):
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                orig = arr[idx]
                arr[idx] = orig + step
                lp, _, _ = nets.backward(model, coords, targets, dtype=np.float64)
                arr[idx] = orig - step
                lm, _, _ = nets.backward(model, coords, targets, dtype=np.float64)
                arr[idx] = orig
                fd = (lp - lm) / (2.0 * step)
                worst = max(worst, abs(fd - grads[idx]) - max(rel * abs(fd), abs_tol))
    return float(worst)
