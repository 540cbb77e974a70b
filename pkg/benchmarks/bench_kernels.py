"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from dma_nearfield import available_backends
from dma_nearfield.beamdepth import (BRACKET_CAP, BRACKET_LOWER, BRACKET_STEP, DEFAULT_TOL,
                                     MONOTONE_UPPER, default_delta_grid, default_w_grid)


def cases(mod):
    rng = np.random.default_rng(7)
    xs = rng.uniform(0.0, 10.0, 2000)
    ws = rng.uniform(0.0, 15.0, 2000)
    zs = rng.uniform(-6, 6, 2000) + 1j * rng.uniform(-6, 6, 2000)
    deltas = default_delta_grid()
    wgrid = default_w_grid()
    out = np.empty((deltas.size, wgrid.size))

    def k_batch():
        for x, w in zip(xs, ws):
            mod.kernel_k(float(x), float(w))

    def erfi_batch():
        for z in zs:
            mod.erfi(complex(z))

    def grid():
        mod.x_delta_grid(deltas, wgrid, BRACKET_LOWER, MONOTONE_UPPER, DEFAULT_TOL,
                         BRACKET_STEP, BRACKET_CAP, out)

    return {"kernel_k x2000": k_batch, "erfi x2000": erfi_batch, "x_delta grid 8x151": grid}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    results = {}
    for name, mod in backends.items():
        for label, fn in cases(mod).items():
            results[(label, name)] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    names = list(backends)
    print(f"{'case':<22}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label in cases(backends["python"]):
        row = [results[(label, n)] for n in names]
        line = f"{label:<22}" + "".join(f"{t * 1e3:>10.2f}ms" for t in row)
        if len(names) > 1:
            line += f"{row[0] / row[1]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
