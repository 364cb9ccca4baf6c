"""Time the numba and pure-numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--layouts 16x16,64x64,128x128]

The numba kernels are compiled (or loaded from cache) before timing starts.
"""

import argparse
import math
import time

import numpy as np

from splitdiffuse import _kernels
from splitdiffuse.cli import parse_layout
from splitdiffuse.core import GREEDY, dimension_ranks


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--layouts", default="16x16,64x64,128x128")
    args = ap.parse_args(argv)

    backends = ["numpy"] + (["numba"] if _kernels.numba_impl is not None else [])
    if len(backends) == 1:
        print("numba is not installed; timing the numpy kernels only")
    rng = np.random.default_rng(0)
    print(f"{'layout':>9} {'kernel':>16} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for text in args.layouts.split(","):
        layout = parse_layout(text)
        k = len(layout)
        coords = rng.normal(size=(math.prod(layout), k))
        ranks = dimension_ranks(coords)
        ext = np.asarray(layout, dtype=np.int64)
        prefs, start = GREEDY.preference(k), GREEDY.start(k)
        cells = _kernels.numpy_impl.split_diffuse(ranks, ext, 0, prefs, start)
        row = {}
        for name in backends:
            m = _kernels.backend(name)
            m.split_diffuse(ranks, ext, 0, prefs, start)  # warm-up / compile
            m.pair_violations(coords, cells)
            row.setdefault("split_diffuse", []).append(
                best_of(lambda: m.split_diffuse(ranks, ext, 0, prefs, start), args.repeat))
            row.setdefault("pair_violations", []).append(
                best_of(lambda: m.pair_violations(coords, cells), args.repeat))
        for kernel, ts in row.items():
            speed = f"{ts[0] / ts[1]:8.1f}x" if len(ts) == 2 else ""
            print(f"{text:>9} {kernel:>16} " + " ".join(f"{t * 1e3:8.2f}ms" for t in ts) + f"  {speed}")


if __name__ == "__main__":
    main()
