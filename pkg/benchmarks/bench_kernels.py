"""Compare the compiled and pure-Python orbit kernels.

Run ``python3 benchmarks/bench_kernels.py``; prints one row per workload with
the best-of-N wall time for each available backend and the speed-up.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pnkunits import kernels
from pnkunits.constructions import make_product_cover, make_symmetric_stack, make_wreath
from pnkunits.invariants import invariant_hilbert


def _raw_workload(s):
    G = s.group()
    alg = s.algebra
    perm, scal = G.kernel_arrays
    monos = np.array(list(alg.basis()), dtype=np.int64)

    def run(backend):
        kernels.orbit_images(perm, scal, [int(o) for o in alg.odd], alg.strides, G.level,
                             monos, backend=backend)

    return run, f"{len(G)} elements x {len(monos)} monomials"


def _hilbert_workload(s):
    G = s.group()
    alg = s.algebra

    def run(backend):
        prev = kernels.get_backend()
        kernels.set_backend(backend)
        try:
            invariant_hilbert(G, alg)
        finally:
            kernels.set_backend(prev)

    return run, f"invariant Hilbert series, |G| = {len(G)}"


WORKLOADS = [
    ("orbit_images wreath(3,1)", lambda: _raw_workload(make_wreath(3, 1))),
    ("orbit_images product-cover(4,4)", lambda: _raw_workload(make_product_cover(4, 4))),
    ("hilbert wreath(3,1)", lambda: _hilbert_workload(make_wreath(3, 1))),
    ("hilbert symmetric-stack(4,6)", lambda: _hilbert_workload(make_symmetric_stack(4, 6))),
]


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    header = f"{'workload':34s} {'size':42s}" + "".join(f"{b:>10s}" for b in backends)
    if "cython" in backends:
        header += f"{'speed-up':>10s}"
    print(header)
    for name, make in WORKLOADS:
        run, size = make()
        times = {b: best_of(lambda b=b: run(b), args.repeat) for b in backends}
        row = f"{name:34s} {size:42s}" + "".join(f"{times[b] * 1e3:8.1f}ms" for b in backends)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
