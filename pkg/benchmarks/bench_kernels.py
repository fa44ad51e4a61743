"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--size 256 512] [--repeat 5]
"""
import argparse
import time

import numpy as np

from skelgcn import _kernels
from skelgcn.imaging import gaussian_kernel, preprocess
from skelgcn.synth import SynthSpec, generate


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def thin(kernel, img):
    while True:
        img, d1 = kernel(img, 1)
        img, d2 = kernel(img, 2)
        if d1 + d2 == 0:
            return img


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, nargs="+", default=[128, 256, 512])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    weights = gaussian_kernel(1.0, 2)
    # compile once up front so timings exclude JIT
    warm = np.zeros((8, 8), np.uint8)
    _kernels._convolve_rows_numba(warm.astype(float), weights)
    _kernels._thinning_pass_numba(warm, 1)

    print(f"{'kernel':<12}{'size':>6}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for n in args.size:
        gray = generate(SynthSpec("ripples", 30.0, 1.0, 6.0, 0, (n, n)))
        src = gray.astype(np.float64)
        binary = preprocess(gray)
        cases = {
            "blur-rows": (lambda: _kernels._convolve_rows_numba(src, weights),
                          lambda: _kernels._convolve_rows_numpy(src, weights)),
            "thin": (lambda: thin(_kernels._thinning_pass_numba, binary),
                     lambda: thin(_kernels._thinning_pass_numpy, binary)),
        }
        for name, (fast, slow) in cases.items():
            a = best_of(fast, args.repeat)
            b = best_of(slow, args.repeat)
            print(f"{name:<12}{n:>6}{a * 1e3:>12.2f}{b * 1e3:>12.2f}{b / a:>10.1f}x")


if __name__ == "__main__":
    main()
