"""Benchmark: compiled Dijkstra kernel vs the pure-Python fallback.

The systole search dominates the package's runtime (per-class, per-basepoint
shortest paths on the lifted grid), so the kernel choice sets the wall-clock
cost of corpus verification.  Run as

    python benchmarks/bench_systole.py [--grid N] [--repeats K]
"""

import argparse
import time

import numpy as np

from systolic import _kernels
from systolic.fields import ConformalMetric, from_analytic
from systolic.lattice import square
from systolic.systole import STENCIL, systole


def time_once(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_kernel_micro(grid, repeats):
    rng = np.random.default_rng(0)
    fbox = np.exp(rng.uniform(-0.7, 0.7, size=(grid + 24, grid + 24)))
    steps = np.linalg.norm(
        (STENCIL / grid).astype(float), axis=1)
    src, dst = 12 * fbox.shape[1] + 12, (grid + 12) * fbox.shape[1] + grid + 12
    rows = []
    for name, kernel in [("python", _kernels.python_dijkstra_box),
                         ("compiled", _kernels.compiled_dijkstra_box)]:
        if kernel is None:
            continue
        t, (d, _) = time_once(
            lambda k=kernel: k(fbox, STENCIL, steps, src, dst, np.inf),
            repeats)
        rows.append((name, t, d))
    return rows


def bench_systole_full(grid, repeats):
    metric = ConformalMetric(from_analytic(
        square(), grid, grid, "trig", eps=0.3, k=1, l=1))
    rows = []
    saved = _kernels.dijkstra_box
    try:
        for name, kernel in [("python", _kernels.python_dijkstra_box),
                             ("compiled", _kernels.compiled_dijkstra_box)]:
            if kernel is None:
                continue
            _kernels.dijkstra_box = kernel
            t, res = time_once(lambda: systole(metric), repeats)
            rows.append((name, t, res.sys))
    finally:
        _kernels.dijkstra_box = saved
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    if _kernels.compiled_dijkstra_box is None:
        print("note: compiled kernel not built; timing the fallback only")

    print(f"single Dijkstra, {args.grid}x{args.grid} strip box:")
    micro = bench_kernel_micro(args.grid, args.repeats)
    for name, t, d in micro:
        print(f"  {name:<9} {t * 1e3:9.2f} ms   (distance {d:.6f})")
    if len(micro) == 2:
        print(f"  speedup   {micro[0][1] / micro[1][1]:9.1f} x")

    print(f"full systole search, {args.grid}x{args.grid} metric:")
    full = bench_systole_full(args.grid, max(1, args.repeats // 3))
    for name, t, s in full:
        print(f"  {name:<9} {t:9.3f} s    (sys {s:.6f})")
    if len(full) == 2:
        print(f"  speedup   {full[0][1] / full[1][1]:9.1f} x")
    if len(full) == 2:
        assert abs(full[0][2] - full[1][2]) <= 1e-12 * max(1.0, full[0][2]), \
            "kernels disagree"


if __name__ == "__main__":
    main()
