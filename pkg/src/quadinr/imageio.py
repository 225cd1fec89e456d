"""PPM (P6/P5, 8-bit) reading and writing, plus optional 8-bit RGB PNG.

Pixels map to [0, 1] by dividing by 255; writing inverts with
round-half-away-from-zero so an 8-bit file survives a read/write round trip
byte for byte (the writer emits the canonical header "P6\\n<w> <h>\\n255\\n").
Grayscale P5 input is promoted to three equal channels.
"""

from __future__ import annotations

import io

import numpy as np


class ImageFormatError(ValueError):
    pass


def _read_header_token(buf: io.BufferedReader) -> bytes:
    """Next whitespace-delimited header token, skipping '#' comments."""
    token = b""
    while True:
        ch = buf.read(1)
        if ch == b"":
            raise ImageFormatError("unexpected end of header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = buf.read(1)
            continue
        if ch.isspace():
            if token:
                return token
            continue
        token += ch


def read_ppm(path) -> np.ndarray:
    """Returns an (H, W, 3) float64 array in [0, 1]."""
    with open(path, "rb") as fh:
        magic = _read_header_token(fh)
        if magic not in (b"P6", b"P5"):
            raise ImageFormatError(f"unsupported magic {magic!r} (need P6 or P5)")
        try:
            width = int(_read_header_token(fh))
            height = int(_read_header_token(fh))
            maxval = int(_read_header_token(fh))
        except ValueError as exc:
            raise ImageFormatError(f"malformed header: {exc}") from None
        if width <= 0 or height <= 0:
            raise ImageFormatError("non-positive image dimensions")
        if maxval != 255:
            raise ImageFormatError(f"only 8-bit depth supported, got maxval {maxval}")
        channels = 3 if magic == b"P6" else 1
        count = width * height * channels
        payload = fh.read(count)
        if len(payload) != count:
            raise ImageFormatError("truncated pixel payload")
    data = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    if channels == 1:
        data = np.repeat(data, 3, axis=2)
    return data.astype(np.float64) / 255.0


def quantize_u8(values: np.ndarray) -> np.ndarray:
    """[0, 1] floats to bytes with round-half-away-from-zero."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    return np.floor(v * 255.0 + 0.5).astype(np.uint8)


def write_ppm(path, img: np.ndarray) -> None:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ImageFormatError("expected an (H, W, 3) image")
    h, w, _ = img.shape
    data = img.astype(np.uint8) if img.dtype == np.uint8 else quantize_u8(img)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def read_image(path) -> np.ndarray:
    """PPM natively; 8-bit RGB PNG through Pillow when installed."""
    name = str(path).lower()
    if name.endswith((".ppm", ".pgm")):
        return read_ppm(path)
    if name.endswith(".png"):
        try:
            from PIL import Image
        except ImportError:
            raise ImageFormatError("PNG support needs Pillow (pip install Pillow)")
        with Image.open(path) as im:
            if im.mode not in ("RGB", "L"):
                im = im.convert("RGB")
            arr = np.asarray(im, dtype=np.uint8)
        if arr.ndim == 2:
            arr = np.repeat(arr[:, :, None], 3, axis=2)
        return arr.astype(np.float64) / 255.0
    raise ImageFormatError(f"unsupported image extension: {path}")


def write_image(path, img: np.ndarray) -> None:
    name = str(path).lower()
    if name.endswith(".ppm"):
        write_ppm(path, img)
        return
    if name.endswith(".png"):
        try:
            from PIL import Image
        except ImportError:
            raise ImageFormatError("PNG support needs Pillow (pip install Pillow)")
        data = img.astype(np.uint8) if img.dtype == np.uint8 else quantize_u8(img)
        Image.fromarray(data, mode="RGB").save(path)
        return
    raise ImageFormatError(f"unsupported image extension: {path}")
