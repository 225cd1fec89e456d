#!/usr/bin/env python3
"""Compare the compiled kernels against the numpy fallback.

Times the three hot paths: float64 activation evaluation (the training
loop's per-step cost), the strict binary32 affine layer with tree reduction
(the simulator's inner loop), and a full simulated inference. Run after an
editable install:

    python benchmarks/bench_backends.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from quadinr import _kernels_np, backend, nets
from quadinr.activations import Family


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if not backend.compiled_available:
        print("compiled extension not built; benchmarking the fallback only")
    impls = [("numpy", _kernels_np)]
    if backend.compiled_available:
        impls.append(("cython", backend.compiled_kernels))

    rng = np.random.default_rng(0)
    rows = []

    x64 = rng.uniform(-8, 8, 4096 * 128)
    for name, mod in impls:
        t = timeit(lambda m=mod: m.af_eval_f64("quad", x64), args.repeats)
        rows.append(("af_eval_f64[quad] 512k", name, t))
    for name, mod in impls:
        t = timeit(lambda m=mod: m.af_eval_f64("sine", x64), args.repeats)
        rows.append(("af_eval_f64[sine] 512k", name, t))

    h = rng.normal(size=(1024, 128)).astype(np.float32)
    W = rng.normal(size=(128, 128)).astype(np.float32)
    b = rng.normal(size=128).astype(np.float32)
    for name, mod in impls:
        t = timeit(lambda m=mod: m.linear_strict32(h, W, b), args.repeats)
        rows.append(("linear_strict32 1024x128x128", name, t))

    from quadinr import accel
    import tempfile, os

    model = nets.init_params([2, 128, 128, 128, 3], Family.QUAD, 30.0, 30.0, seed=0)
    with tempfile.TemporaryDirectory() as td:
        path = os.path.join(td, "m.qbin")
        nets.save_model(model, path)
        mem = accel.load_model(path)
    cfg = accel.AcceleratorConfig(af_plan=accel.activation_plan(Family.QUAD))
    coords = nets.make_grid((64, 64))
    saved = backend.kernels
    for name, mod in impls:
        backend.kernels = mod
        t = timeit(lambda: accel.run_inference(cfg, mem, coords), max(1, args.repeats // 2))
        rows.append(("run_inference 64x64 w128d3", name, t))
    backend.kernels = saved

    width = max(len(r[0]) for r in rows)
    print(f"{'benchmark':<{width}}  backend  best (ms)")
    base: dict = {}
    for bench, name, t in rows:
        note = ""
        if name == "numpy":
            base[bench] = t
        elif bench in base:
            note = f"  ({base[bench] / t:.1f}x vs numpy)"
        print(f"{bench:<{width}}  {name:7s}  {t * 1e3:9.2f}{note}")


if __name__ == "__main__":
    main()
