"""Zhang-Suen parallel thinning.

Neighbours P2..P9 run clockwise from north. Pixels outside the image count
as background, and every deletion inside a sub-pass is decided against the
image as it stood before that sub-pass.
"""
import numpy as np

from . import _kernels
from .errors import ParameterError


def _as_binary(binary):
    binary = np.asarray(binary)
    if binary.ndim != 2:
        raise ParameterError(f"expected a 2-D binary image, got shape {binary.shape}")
    return np.ascontiguousarray(binary != 0, dtype=np.uint8)


def thinning_pass(binary, sub_pass):
    """Run one sub-pass; return ``(thinned, deleted_count)``."""
    if sub_pass not in (1, 2):
        raise ParameterError(f"sub_pass must be 1 or 2, got {sub_pass}")
    out, deleted = _kernels.thinning_pass_kernel(_as_binary(binary), sub_pass)
    return out, int(deleted)


def skeletonize(binary, trace=None):
    """Thin ``binary`` until a full iteration deletes nothing.

    If ``trace`` is a callable it receives ``(iteration, sub_pass, image)``
    after every sub-pass.
    """
    img = _as_binary(binary)
    iteration = 0
    while True:
        iteration += 1
        img, d1 = _kernels.thinning_pass_kernel(img, 1)
        if trace is not None:
            trace(iteration, 1, img)
        img, d2 = _kernels.thinning_pass_kernel(img, 2)
        if trace is not None:
            trace(iteration, 2, img)
        if d1 + d2 == 0:
            return img
