"""Compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best wall time of each kernel on both backends and checks that
the outputs agree bit for bit.
"""

import argparse
import timeit

import numpy as np

from lagform import _pykernels
from lagform.exterior import _wedge_table, basis_rows

try:
    from lagform import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    for n, batch in ((2, 20000), (3, 5000), (4, 500)):
        rows = np.ascontiguousarray(basis_rows(n, n))
        frames = rng.normal(size=(batch, 2 * n, n))
        c = rng.normal(size=(2, len(rows)))
        yield f"minors n={n} batch={batch}", "minors", (rows, frames)
        yield f"eval_on_frames n={n} batch={batch}", "eval_on_frames", (rows, c[0].copy(), c[1].copy(), frames)
    for n in (3, 4):
        ia, ib, io, sg = _wedge_table(n, n, n)
        na, nout = len(basis_rows(n, n)), len(basis_rows(n, 2 * n))
        a, b = rng.normal(size=(2, na)), rng.normal(size=(2, na))
        yield f"table_product n={n}", "table_product", (ia, ib, io, sg, a[0], a[1], b[0], b[1], nout)


def same(x, y):
    if isinstance(x, tuple):
        return all(np.array_equal(u, v) for u, v in zip(x, y))
    return np.array_equal(x, y)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':34s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}  equal")
    for label, name, inputs in cases(rng):
        py = getattr(_pykernels, name)
        t_py = min(timeit.repeat(lambda: py(*inputs), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{label:34s} {t_py:10.4f} {'n/a':>10s}")
            continue
        cy = getattr(_ckernels, name)
        t_cy = min(timeit.repeat(lambda: cy(*inputs), number=1, repeat=args.repeat))
        eq = same(py(*inputs), cy(*inputs))
        print(f"{label:34s} {t_py:10.4f} {t_cy:10.4f} {t_py / t_cy:8.1f}  {eq}")


if __name__ == "__main__":
    main()
