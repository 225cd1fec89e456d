"""Coordinate-MLP training: forward, reverse-mode gradients, Adam, PSNR.

Models are plain affine stacks. Every layer except the last applies the
activation to omega0-scaled pre-activations: h = phi(omega0 * (W h + b)).
Parameters are stored in binary32 (the accelerator datatype); the training
loop keeps them quantized to binary32 after every update while running the
optimizer arithmetic and loss reductions in binary64. Gradient checks run
the same forward/backward code in pure binary64, where central differences
are meaningful.

A strict binary32 forward (``forward_strict32``) mirrors the accelerator:
lane products padded to a power of two, reduced by an adjacent-pair adder
tree, bias added, scaled, then a caller-supplied binary32 activation. It is
the reference the hardware simulator must match bit for bit.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import backend
from .activations import Family

QBIN_MAGIC = b"QINR"
QBIN_VERSION = 1


class TrainingDiverged(RuntimeError):
    def __init__(self, message: str, trace: list[float]):
        super().__init__(message)
        self.trace = trace


@dataclass
class MlpModel:
    """Affine stack with per-layer float32 parameters.

    dims = (input_dim, hidden..., output_dim); the output layer applies no
    activation and no omega0 scale.
    """

    dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    family: Family
    omega0_first: float
    omega0_hidden: float

    def __post_init__(self):
        if len(self.dims) < 2:
            raise ValueError("need at least one layer")
        if len(self.weights) != len(self.dims) - 1 or len(self.biases) != len(self.weights):
            raise ValueError("parameter count does not match dims")
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape != (self.dims[i], self.dims[i + 1]) or b.shape != (self.dims[i + 1],):
                raise ValueError(f"layer {i} parameter shape mismatch")
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {i} parameters must be finite")
        if self.omega0_first <= 0 or self.omega0_hidden <= 0:
            raise ValueError("omega0 must be positive")

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def layer_omega0(self, i: int) -> float:
        return self.omega0_first if i == 0 else self.omega0_hidden

    def param_count(self) -> int:
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))


@dataclass
class SignalDataset:
    """Coordinates on the uniform [-1, 1] lattice with targets in [0, 1]."""

    coords: np.ndarray   # (N, d)
    targets: np.ndarray  # (N, c)
    shape: tuple[int, ...]

    def __post_init__(self):
        n = int(np.prod(self.shape))
        if self.coords.shape[0] != n or self.targets.shape[0] != n:
            raise ValueError("coords/targets must cover the full lattice")

    @classmethod
    def from_image(cls, img: np.ndarray) -> "SignalDataset":
        h, w, c = img.shape
        return cls(make_grid((h, w)), img.reshape(h * w, c).astype(np.float64), (h, w))

    @classmethod
    def from_video(cls, vid: np.ndarray) -> "SignalDataset":
        t, h, w, c = vid.shape
        return cls(make_grid((t, h, w)), vid.reshape(t * h * w, c).astype(np.float64),
                   (t, h, w))


@dataclass
class TrainConfig:
    steps: int
    lr_init: float
    lr_final_fraction: float = 0.1
    batch: int | None = None  # None = full batch (deterministic default)
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not (0.0 < self.lr_final_fraction <= 1.0):
            raise ValueError("lr_final_fraction must be in (0, 1]")
        if self.lr_init <= 0:
            raise ValueError("lr_init must be positive")


@dataclass
class TrainResult:
    model: MlpModel
    loss_trace: np.ndarray  # float64, one entry per step


def make_grid(shape) -> np.ndarray:
    """Uniform lattice over [-1, 1]^d: index i on an n-point axis maps to
    2i/(n-1) - 1; single-point axes map to 0."""
    axes = []
    for n in shape:
        if n < 1:
            raise ValueError("axis lengths must be positive")
        axes.append(np.zeros(1) if n == 1 else 2.0 * np.arange(n) / (n - 1) - 1.0)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def init_params(dims, family: Family, omega0_first: float, omega0_hidden: float,
                seed: int) -> MlpModel:
    """First layer uniform on [-1/fan_in, 1/fan_in]; every later layer
    uniform on +-sqrt(6/fan_in)/omega0_hidden. Deterministic per seed."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for i in range(len(dims) - 1):
        fan_in = dims[i]
        if i == 0:
            bound = 1.0 / fan_in
        else:
            bound = np.sqrt(6.0 / fan_in) / omega0_hidden
        W = rng.uniform(-bound, bound, size=(dims[i], dims[i + 1])).astype(np.float32)
        b = rng.uniform(-bound, bound, size=dims[i + 1]).astype(np.float32)
        weights.append(W)
        biases.append(b)
    return MlpModel(tuple(int(d) for d in dims), weights, biases, family,
                    float(omega0_first), float(omega0_hidden))


def _act(family: Family, u: np.ndarray, dtype) -> np.ndarray:
    # bypasses the public finite-input validation: a diverging training run
    # must surface as a non-finite loss with layer diagnostics, not here
    flat = np.ascontiguousarray(u.astype(np.float64).ravel())
    with np.errstate(all="ignore"):
        out = backend.kernels.af_eval_f64(family.value, flat)
    return out.reshape(u.shape).astype(dtype, copy=False)


def _act_grad(family: Family, u: np.ndarray, dtype) -> np.ndarray:
    flat = np.ascontiguousarray(u.astype(np.float64).ravel())
    with np.errstate(all="ignore"):
        out = backend.kernels.af_grad_f64(family.value, flat)
    return out.reshape(u.shape).astype(dtype, copy=False)


def _forward_full(model: MlpModel, coords: np.ndarray, dtype):
    """Returns (hidden inputs per layer, scaled pre-activations, output)."""
    h = np.ascontiguousarray(coords, dtype=dtype)
    hs = [h]
    us: list[np.ndarray | None] = []
    for i in range(model.n_layers):
        W = np.asarray(model.weights[i], dtype=dtype)
        b = np.asarray(model.biases[i], dtype=dtype)
        z = h @ W + b
        if i < model.n_layers - 1:
            u = np.asarray(model.layer_omega0(i), dtype=dtype) * z
            us.append(u)
            h = _act(model.family, u, dtype)
        else:
            us.append(None)
            h = z
        hs.append(h)
    return hs, us, h


def forward(model: MlpModel, coords: np.ndarray, dtype=np.float32) -> np.ndarray:
    coords = np.asarray(coords)
    if coords.ndim != 2 or coords.shape[1] != model.dims[0]:
        raise ValueError(f"coords must be (N, {model.dims[0]})")
    _, _, out = _forward_full(model, coords, dtype)
    return out


def backward(model: MlpModel, coords: np.ndarray, targets: np.ndarray,
             dtype=np.float32):
    """MSE loss and exact reverse-mode gradients for every parameter.

    Returns (loss, weight_grads, bias_grads). The loss reduction runs in
    binary64 regardless of the compute dtype.
    """
    coords = np.asarray(coords)
    targets = np.asarray(targets)
    if coords.shape[0] != targets.shape[0]:
        raise ValueError("coords/targets batch size mismatch")
    if targets.ndim != 2 or targets.shape[1] != model.dims[-1]:
        raise ValueError(f"targets must be (N, {model.dims[-1]})")
    hs, us, out = _forward_full(model, coords, dtype)
    resid = out.astype(np.float64) - targets.astype(np.float64)
    loss = float(np.mean(resid * resid))
    if not np.isfinite(loss):
        bad = _first_nonfinite_layer(hs, us)
        raise TrainingDiverged(f"non-finite loss (first bad layer: {bad})", [])
    n, c = targets.shape
    g = (2.0 * resid / (n * c)).astype(dtype)
    w_grads: list[np.ndarray] = [None] * model.n_layers  # type: ignore[list-item]
    b_grads: list[np.ndarray] = [None] * model.n_layers  # type: ignore[list-item]
    for i in reversed(range(model.n_layers)):
        if i < model.n_layers - 1:
            w0 = np.asarray(model.layer_omega0(i), dtype=dtype)
            g = g * _act_grad(model.family, us[i], dtype) * w0
        w_grads[i] = hs[i].T @ g
        b_grads[i] = g.sum(axis=0, dtype=np.float64).astype(dtype)
        if i > 0:
            g = g @ np.asarray(model.weights[i], dtype=dtype).T
    return loss, w_grads, b_grads


def _first_nonfinite_layer(hs, us) -> str:
    for i, h in enumerate(hs[1:]):
        if not np.all(np.isfinite(h)):
            return f"layer {i} output"
    for i, u in enumerate(us):
        if u is not None and not np.all(np.isfinite(u)):
            return f"layer {i} pre-activation"
    return "output residual"


def lr_at(cfg: TrainConfig, step: int) -> float:
    """Exponential decay reaching lr_init * lr_final_fraction at the last
    step: lr(t) = lr_init * fraction**(t/steps)."""
    return cfg.lr_init * cfg.lr_final_fraction ** (step / cfg.steps)


def train(model: MlpModel, dataset: SignalDataset, cfg: TrainConfig) -> TrainResult:
    """Adam (beta1=0.9, beta2=0.999, eps=1e-8) with exponential lr decay.

    Full-batch by default; a batch size turns on seeded shuffling. Parameters
    are re-quantized to binary32 after each update; moments and update math
    stay in binary64. Deterministic for a fixed (seed, config, dataset).
    """
    coords = np.ascontiguousarray(dataset.coords, dtype=np.float32)
    targets = np.ascontiguousarray(dataset.targets, dtype=np.float32)
    params = [p.copy() for p in model.weights] + [p.copy() for p in model.biases]
    work = MlpModel(model.dims, params[:model.n_layers], params[model.n_layers:],
                    model.family, model.omega0_first, model.omega0_hidden)
    m = [np.zeros(p.shape, np.float64) for p in params]
    v = [np.zeros(p.shape, np.float64) for p in params]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    trace: list[float] = []
    rng = np.random.default_rng(cfg.seed)
    order = np.arange(coords.shape[0])
    cursor = 0
    for t in range(1, cfg.steps + 1):
        if cfg.batch is None:
            bc, bt = coords, targets
        else:
            if cursor + cfg.batch > order.size:
                rng.shuffle(order)
                cursor = 0
            sel = order[cursor:cursor + cfg.batch]
            cursor += cfg.batch
            bc, bt = coords[sel], targets[sel]
        try:
            loss, w_grads, b_grads = backward(work, bc, bt, dtype=np.float32)
        except TrainingDiverged as exc:
            raise TrainingDiverged(str(exc), trace) from None
        trace.append(loss)
        lr = lr_at(cfg, t)
        grads = w_grads + b_grads
        for p, mi, vi, gr in zip(params, m, v, grads):
            g64 = gr.astype(np.float64)
            mi *= beta1
            mi += (1.0 - beta1) * g64
            vi *= beta2
            vi += (1.0 - beta2) * g64 * g64
            mhat = mi / (1.0 - beta1 ** t)
            vhat = vi / (1.0 - beta2 ** t)
            p[...] = (p.astype(np.float64) - lr * mhat / (np.sqrt(vhat) + eps)
                      ).astype(np.float32)
    return TrainResult(work, np.asarray(trace, dtype=np.float64))


def clone_model(model: MlpModel, dtype=np.float64) -> MlpModel:
    """Parameter copy in another dtype (float64 clones suit gradient
    checks, where perturbations must not quantize)."""
    return MlpModel(model.dims,
                    [W.astype(dtype) for W in model.weights],
                    [b.astype(dtype) for b in model.biases],
                    model.family, model.omega0_first, model.omega0_hidden)


def psnr(pred: np.ndarray, target: np.ndarray, peak: float = 1.0) -> float:
    """10*log10(peak**2 / MSE); identical inputs give +inf."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError("shape mismatch")
    mse = float(np.mean((pred - target) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(peak * peak / mse)


# ---------------------------------------------------------------------------
# strict binary32 reference forward (the accelerator equivalence oracle)


def pairwise_fold32(prods: np.ndarray) -> np.ndarray:
    """Adjacent-pair reduction over the last axis, each add rounded to
    binary32, lanes zero-padded to the next power of two."""
    prods = np.asarray(prods, dtype=np.float32)
    n = prods.shape[-1]
    width = 1
    while width < n:
        width *= 2
    if width != n:
        pad = np.zeros(prods.shape[:-1] + (width - n,), dtype=np.float32)
        prods = np.concatenate([prods, pad], axis=-1)
    while prods.shape[-1] > 1:
        prods = (prods[..., 0::2] + prods[..., 1::2]).astype(np.float32)
    return prods[..., 0]


def forward_strict32(model: MlpModel, coords: np.ndarray, af32_fns,
                     chunk: int = 512) -> np.ndarray:
    """Forward pass with the documented fixed reduction order, entirely in
    binary32. af32_fns maps layer index -> binary32 activation callable for
    every non-final layer (the simulator supplies the same callables).
    """
    x = np.ascontiguousarray(coords, dtype=np.float32)
    outs = []
    for lo in range(0, x.shape[0], chunk):
        h = x[lo:lo + chunk]
        for i in range(model.n_layers):
            W = model.weights[i]
            b = model.biases[i]
            prods = h[:, :, None] * W[None, :, :]           # (n, din, dout)
            acc = pairwise_fold32(np.swapaxes(prods, 1, 2))  # (n, dout)
            z = (acc + b).astype(np.float32)
            if i < model.n_layers - 1:
                u = (np.float32(model.layer_omega0(i)) * z).astype(np.float32)
                h = af32_fns[i](u)
            else:
                h = z
        outs.append(h)
    return np.concatenate(outs, axis=0)


# ---------------------------------------------------------------------------
# model file format


def save_model(model: MlpModel, path) -> None:
    """Little-endian container: magic, version, dims, activation id, omega0
    pair, then per-layer float32 W (row-major) and b."""
    fam_ids = {f: i for i, f in enumerate(Family)}
    with open(path, "wb") as fh:
        fh.write(QBIN_MAGIC)
        fh.write(struct.pack("<H", QBIN_VERSION))
        fh.write(struct.pack("<H", len(model.dims)))
        fh.write(struct.pack(f"<{len(model.dims)}I", *model.dims))
        fh.write(struct.pack("<B", fam_ids[model.family]))
        fh.write(struct.pack("<ff", model.omega0_first, model.omega0_hidden))
        for W, b in zip(model.weights, model.biases):
            fh.write(np.ascontiguousarray(W, dtype="<f4").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f4").tobytes())


def load_model(path) -> MlpModel:
    families = list(Family)
    with open(path, "rb") as fh:
        raw = fh.read()
    off = 0

    def take(n: int) -> bytes:
        nonlocal off
        if off + n > len(raw):
            raise ValueError("truncated model file")
        chunk = raw[off:off + n]
        off += n
        return chunk

    if take(4) != QBIN_MAGIC:
        raise ValueError("bad magic: not a model file")
    (version,) = struct.unpack("<H", take(2))
    if version != QBIN_VERSION:
        raise ValueError(f"unsupported model version {version}")
    (ndims,) = struct.unpack("<H", take(2))
    if ndims < 2:
        raise ValueError("model needs at least two dims")
    dims = struct.unpack(f"<{ndims}I", take(4 * ndims))
    (fam_id,) = struct.unpack("<B", take(1))
    if fam_id >= len(families):
        raise ValueError(f"unknown activation id {fam_id}")
    w0f, w0h = struct.unpack("<ff", take(8))
    weights, biases = [], []
    for i in range(ndims - 1):
        din, dout = dims[i], dims[i + 1]
        W = np.frombuffer(take(4 * din * dout), dtype="<f4").reshape(din, dout).copy()
        b = np.frombuffer(take(4 * dout), dtype="<f4").copy()
        weights.append(W)
        biases.append(b)
    if off != len(raw):
        raise ValueError("trailing bytes after model payload")
    return MlpModel(tuple(dims), weights, biases, families[fam_id],
                    float(w0f), float(w0h))
