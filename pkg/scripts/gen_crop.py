#!/usr/bin/env python3
"""Regenerate the bundled 64x64 test crop (src/quadinr/data/crop64.ppm).

The crop is procedural but aims for natural-image statistics: smooth color
gradients, soft blobs, oriented texture, and a few hard edges. The file is
committed, so this script only matters when the recipe changes.
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from quadinr.imageio import write_ppm  # noqa: E402


def make_crop(seed: int = 20240807) -> np.ndarray:
    h = w = 64
    ys, xs = np.meshgrid(np.linspace(0, 1, h), np.linspace(0, 1, w), indexing="ij")
    rng = np.random.default_rng(seed)
    img = np.zeros((h, w, 3))
    img[..., 0] = 0.55 + 0.3 * ys - 0.15 * xs
    img[..., 1] = 0.45 + 0.25 * np.sin(2.2 * np.pi * xs + 0.7)
    img[..., 2] = 0.5 + 0.35 * (xs - 0.5) * (ys - 0.5) * 4
    for _ in range(6):
        cy, cx = rng.uniform(0.1, 0.9, size=2)
        r = rng.uniform(0.05, 0.25)
        amp = rng.uniform(-0.45, 0.45, size=3)
        blob = np.exp(-(((ys - cy) ** 2 + (xs - cx) ** 2) / (2 * r * r)))
        img += amp * blob[..., None]
    tex = (0.08 * np.sin(24 * np.pi * (0.6 * xs + 0.4 * ys))
           + 0.05 * np.sin(40 * np.pi * (xs - 0.3 * ys)))
    img += tex[..., None] * np.array([1.0, 0.8, 0.6])
    box = ((xs > 0.58) & (xs < 0.82) & (ys > 0.22) & (ys < 0.55)).astype(float)
    img[..., 0] += 0.25 * box
    img[..., 1] -= 0.2 * box
    disc = (((xs - 0.3) ** 2 + (ys - 0.7) ** 2) < 0.018).astype(float)
    img[..., 2] += 0.35 * disc
    img[..., 0] -= 0.15 * disc
    return np.clip(img, 0.0, 1.0)


if __name__ == "__main__":
    out = pathlib.Path(__file__).resolve().parents[1] / "src/quadinr/data/crop64.ppm"
    write_ppm(out, make_crop())
    print(f"wrote {out}")
