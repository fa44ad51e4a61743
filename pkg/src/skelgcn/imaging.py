"""Raster I/O and preprocessing: Gaussian blur, threshold binarization, inversion.

Gray images are 2-D ``uint8`` arrays (rows × cols). Binary images are 2-D
``uint8`` arrays holding only 0 and 1.
"""
import os
import re
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ImageFormatError, ParameterError

DEFAULT_BLUR_SIGMA = 1.0
DEFAULT_BLUR_RADIUS = 2
DEFAULT_THRESHOLD = 100

_PNM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*([^\s#]+)")


def _check_gray(img):
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ParameterError(f"expected a non-empty 2-D image, got shape {img.shape}")
    return img


def luminance(rgb):
    """Convert an ``(..., 3)`` uint8 array with 0.299R + 0.587G + 0.114B, rounded half-up."""
    rgb = np.asarray(rgb, dtype=np.int64)
    # integer arithmetic keeps the .5 tie exact
    total = 299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2]
    return ((total + 500) // 1000).astype(np.uint8)


def _read_pnm(path, raw):
    tokens = []
    pos = 0
    # magic, width, height, maxval; comments allowed between tokens
    while len(tokens) < 4:
        m = _PNM_TOKEN.match(raw, pos)
        if m is None:
            raise ImageFormatError(path, "truncated PNM header")
        tokens.append(m.group(1))
        pos = m.end()
    magic = tokens[0].decode("ascii", "replace")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError(path, "malformed PNM header") from None
    if width < 1 or height < 1:
        raise ImageFormatError(path, f"invalid dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise ImageFormatError(path, f"unsupported bit depth (maxval {maxval}); only 8-bit is supported")
    channels = 3 if magic in ("P3", "P6") else 1
    count = width * height * channels
    if magic in ("P5", "P6"):
        body = raw[pos + 1:pos + 1 + count]
        if len(body) != count:
            raise ImageFormatError(path, f"expected {count} data bytes, found {len(body)}")
        data = np.frombuffer(body, dtype=np.uint8)
    else:
        try:
            data = np.array(raw[pos:].split()[:count], dtype=np.int64)
        except ValueError:
            raise ImageFormatError(path, "non-numeric ASCII sample") from None
        if data.size != count or data.max(initial=0) > maxval:
            raise ImageFormatError(path, "ASCII sample count or range mismatch")
        data = data.astype(np.uint8)
    if channels == 3:
        return luminance(data.reshape(height, width, 3))
    return data.reshape(height, width).copy()


def load_grayscale(path):
    """Read an 8-bit PGM/PPM (binary or ASCII) or PNG as a gray ``uint8`` array."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ImageFormatError(path, f"unreadable file ({exc.strerror})") from exc
    if raw[:2] in (b"P2", b"P3", b"P5", b"P6"):
        return _read_pnm(path, raw)
    if raw[:8] == b"\x89PNG\r\n\x1a\n":
        return _read_png(path)
    raise ImageFormatError(path, "unsupported raster format")


def _read_png(path):
    from PIL import Image

    with Image.open(path) as im:
        if im.mode == "L":
            return np.array(im, dtype=np.uint8)
        if im.mode in ("1", "P", "LA", "RGBA", "RGB"):
            rgb = np.array(im.convert("RGB"), dtype=np.uint8)
            return luminance(rgb)
        raise ImageFormatError(path, f"unsupported bit depth / mode {im.mode!r}")


def _atomic_write(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def save_pgm(path, img):
    """Write a gray image as binary PGM (P5)."""
    img = _check_gray(img)
    if img.dtype != np.uint8:
        raise ParameterError(f"PGM output requires uint8 data, got {img.dtype}")
    h, w = img.shape
    _atomic_write(path, b"P5\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(img).tobytes())


def save_binary_pgm(path, binary):
    """Write a 0/1 image as PGM with values {0, 255}."""
    save_pgm(path, (np.asarray(binary, dtype=np.uint8) * 255).astype(np.uint8))


def load_binary_pgm(path):
    """Read a {0, 255} PGM back as a 0/1 image."""
    img = load_grayscale(path)
    if not np.isin(img, (0, 255)).all():
        raise ImageFormatError(path, "binary PGM must contain only 0 and 255")
    return (img == 255).astype(np.uint8)


def save_ppm(path, rgb):
    rgb = np.asarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ParameterError(f"PPM output requires an (h, w, 3) array, got {rgb.shape}")
    h, w, _ = rgb.shape
    _atomic_write(path, b"P6\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(rgb).tobytes())


def gaussian_kernel(sigma, radius):
    """Normalized 1-D Gaussian weights of length ``2 * radius + 1``."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if int(radius) != radius or radius < 1:
        raise ParameterError(f"radius must be an integer >= 1, got {radius}")
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return weights / weights.sum()


def gaussian_blur(img, sigma=DEFAULT_BLUR_SIGMA, radius=DEFAULT_BLUR_RADIUS):
    """Separable Gaussian blur with edge replication, rounded half-up to uint8.

    Rows are filtered first, then columns; rounding happens once at the end.
    """
    img = _check_gray(img)
    weights = gaussian_kernel(sigma, radius)
    horiz = _kernels.convolve_rows(np.ascontiguousarray(img, dtype=np.float64), weights)
    both = _kernels.convolve_rows(np.ascontiguousarray(horiz.T), weights).T
    return np.clip(np.floor(both + 0.5), 0, 255).astype(np.uint8)


def threshold_binarize(img, threshold=DEFAULT_THRESHOLD):
    """1 where ``img > threshold`` (strict), else 0."""
    img = _check_gray(img)
    if not 0 <= threshold <= 255:
        raise ParameterError(f"threshold must lie in [0, 255], got {threshold}")
    return (img > threshold).astype(np.uint8)


def invert(binary):
    return (1 - np.asarray(binary, dtype=np.uint8)).astype(np.uint8)


def preprocess(img, sigma=DEFAULT_BLUR_SIGMA, radius=DEFAULT_BLUR_RADIUS,
               threshold=DEFAULT_THRESHOLD, invert_output=True):
    """Blur, binarize and (by default) invert, i.e. the wall foreground."""
    binary = threshold_binarize(gaussian_blur(img, sigma, radius), threshold)
    return invert(binary) if invert_output else binary
