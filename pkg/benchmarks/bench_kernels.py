"""Compare the compiled core against the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 32 200 800] [--repeat 3]

numpy's LAPACK eigvalsh is timed alongside as a reference point.
"""
import argparse
import timeit

import numpy as np

from histent import _pycore

try:
    from histent import _core
except ImportError:  # not built
    _core = None


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 200, 800])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = [_pycore] + ([_core] if _core is not None else [])
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'N':>6}" + "".join(f"{b.NAME:>12}" for b in backends) + f"{'speedup':>10}")
    for n in args.sizes:
        a = np.cumsum(rng.normal(0, 1, n))
        m = _pycore.overlap_matrix(a)
        cases = [
            ("overlap_matrix", lambda k: k.overlap_matrix(a)),
            ("prefix_purity", lambda k: k.prefix_purity(a)),
            ("jacobi_eigh" if n <= 64 else "tridiag_ql_eigh",
             (lambda k: k.jacobi_eigh(m, False)) if n <= 64 else (lambda k: k.tridiag_ql_eigh(m, False))),
        ]
        for name, fn in cases:
            times = [_best(lambda k=k: fn(k), args.repeat) for k in backends]
            speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
            print(f"{name:<22}{n:>6}" + "".join(f"{t:>11.4f}s" for t in times) + speed)
        t = _best(lambda: np.linalg.eigvalsh(m), args.repeat)
        print(f"{'numpy eigvalsh':<22}{n:>6}{t:>11.4f}s")


if __name__ == "__main__":
    main()
