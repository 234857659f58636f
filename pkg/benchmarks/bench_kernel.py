#!/usr/bin/env python3
"""Benchmark the compiled per-pixel kernel against the numpy fallback.

Builds a 4-target corrector from the built-in chart, runs both backends
over the same random pixel buffer, and reports throughput plus the
largest output deviation between them.

    python3 benchmarks/bench_kernel.py --pixels 1048576 --repeats 5
"""

import argparse
import time

import numpy as np

from ncolor import balancing, chart_data, color_core
from ncolor._kernel import available_backends


def time_backend(fn, pixels, targets, matrices, y_eps, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(pixels, targets, matrices, y_eps)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pixels", type=int, default=1 << 20)
    parser.add_argument("--targets", type=int, default=4,
                        help="number of target colors (2-24)")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    reference = chart_data.reference_chart()
    skewed = chart_data.synthesize_chart(reference, (0.8, 1.0, 1.3))
    ids = (list(chart_data.DEFAULT_TARGET_IDS) + list(range(1, 13)))[: args.targets]
    corrs = chart_data.correspondences_from_charts(skewed, reference, ids)
    corrector = balancing.build_ncb(color_core.BRADFORD, corrs)

    rng = np.random.default_rng(args.seed)
    pixels = np.ascontiguousarray(rng.uniform(0.01, 1.5, size=(args.pixels, 3)))
    targets = np.ascontiguousarray(corrector.targets)
    matrices = np.ascontiguousarray(corrector.matrices)

    backends = available_backends()
    print(f"pixels: {args.pixels}  targets: {len(ids)}  repeats: {args.repeats}")
    results = {}
    for name, fn in backends.items():
        seconds, out = time_backend(
            fn, pixels, targets, matrices, balancing.Y_EPSILON, args.repeats
        )
        results[name] = (seconds, out)
        print(f"{name:>6}: {seconds * 1e3:9.2f} ms   "
              f"{args.pixels / seconds / 1e6:8.2f} Mpx/s")

    if len(results) == 2:
        ext_s, ext_out = results["ext"]
        np_s, np_out = results["numpy"]
        diff = float(np.abs(ext_out - np_out).max())
        print(f"speedup ext vs numpy: {np_s / ext_s:.2f}x   max |diff|: {diff:.3e}")
    else:
        print("compiled backend unavailable; benchmarked the fallback only")


if __name__ == "__main__":
    main()
