"""Hot per-pixel kernels, each in a numba and a pure-numpy flavour.

Both flavours perform the same floating-point operations in the same order,
so their outputs are bit-identical. Public callers go through the dispatch
names at the bottom of the module.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


# -- separable convolution along rows, edge-replicated borders -------------

@njit
def _convolve_rows_numba(src, weights):
    h, w = src.shape
    radius = (weights.shape[0] - 1) // 2
    out = np.empty((h, w), dtype=np.float64)
    for r in range(h):
        for c in range(w):
            acc = 0.0
            for k in range(weights.shape[0]):
                cc = c + k - radius
                if cc < 0:
                    cc = 0
                elif cc > w - 1:
                    cc = w - 1
                acc += weights[k] * src[r, cc]
            out[r, c] = acc
    return out


def _convolve_rows_numpy(src, weights):
    h, w = src.shape
    radius = (weights.shape[0] - 1) // 2
    padded = np.pad(src, ((0, 0), (radius, radius)), mode="edge")
    out = np.zeros((h, w), dtype=np.float64)
    for k in range(weights.shape[0]):
        out += weights[k] * padded[:, k:k + w]
    return out


# -- one Zhang-Suen sub-pass ------------------------------------------------

@njit
def _thinning_pass_numba(img, sub_pass):
    h, w = img.shape
    out = img.copy()
    deleted = 0
    nb = np.zeros(9, dtype=np.int64)
    for r in range(h):
        for c in range(w):
            if img[r, c] == 0:
                continue
            # P2..P9 clockwise from north; nb[8] repeats P2 for the wrap
            nb[0] = img[r - 1, c] if r > 0 else 0
            nb[1] = img[r - 1, c + 1] if (r > 0 and c < w - 1) else 0
            nb[2] = img[r, c + 1] if c < w - 1 else 0
            nb[3] = img[r + 1, c + 1] if (r < h - 1 and c < w - 1) else 0
            nb[4] = img[r + 1, c] if r < h - 1 else 0
            nb[5] = img[r + 1, c - 1] if (r < h - 1 and c > 0) else 0
            nb[6] = img[r, c - 1] if c > 0 else 0
            nb[7] = img[r - 1, c - 1] if (r > 0 and c > 0) else 0
            nb[8] = nb[0]
            b = 0
            a = 0
            for k in range(8):
                b += nb[k]
                if nb[k] == 0 and nb[k + 1] == 1:
                    a += 1
            if b < 2 or b > 6 or a != 1:
                continue
            p2, p4, p6, p8 = nb[0], nb[2], nb[4], nb[6]
            if sub_pass == 1:
                ok = p2 * p4 * p6 == 0 and p4 * p6 * p8 == 0
            else:
                ok = p2 * p4 * p8 == 0 and p2 * p6 * p8 == 0
            if ok:
                out[r, c] = 0
                deleted += 1
    return out, deleted


def _thinning_pass_numpy(img, sub_pass):
    h, w = img.shape
    p = np.pad(img.astype(np.int64), 1)
    p2 = p[0:h, 1:w + 1]
    p3 = p[0:h, 2:w + 2]
    p4 = p[1:h + 1, 2:w + 2]
    p5 = p[2:h + 2, 2:w + 2]
    p6 = p[2:h + 2, 1:w + 1]
    p7 = p[2:h + 2, 0:w]
    p8 = p[1:h + 1, 0:w]
    p9 = p[0:h, 0:w]
    seq = (p2, p3, p4, p5, p6, p7, p8, p9, p2)
    b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9
    a = sum(((seq[k] == 0) & (seq[k + 1] == 1)).astype(np.int64) for k in range(8))
    if sub_pass == 1:
        c3 = p2 * p4 * p6 == 0
        c4 = p4 * p6 * p8 == 0
    else:
        c3 = p2 * p4 * p8 == 0
        c4 = p2 * p6 * p8 == 0
    marks = (img != 0) & (b >= 2) & (b <= 6) & (a == 1) & c3 & c4
    out = img.copy()
    out[marks] = 0
    return out, int(marks.sum())


if USE_NUMBA:
    convolve_rows = _convolve_rows_numba
    thinning_pass_kernel = _thinning_pass_numba
else:
    convolve_rows = _convolve_rows_numpy
    thinning_pass_kernel = _thinning_pass_numpy
