"""Compare the compiled kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import timeit

import numpy as np

from ctclab import _kernels_py, kernels
from ctclab.dctc import channel_superoperator, random_channel
from ctclab.linalg import make_rng, maximally_mixed, vec

try:
    from ctclab import _kernels as _compiled
except ImportError:
    _compiled = None


def cases(rng):
    ch = random_channel(rng, 2, 3)
    M = channel_superoperator(ch)
    v0 = vec(maximally_mixed(3))
    n = 200_000
    t = rng.uniform(-3.0, 3.0, n)
    x = rng.uniform(-6.0, 6.0, n)
    side = np.zeros(n, dtype=np.intc)
    return {
        "cesaro N=100000 (9x9)": lambda impl: kernels.cesaro(M, v0, 100_000, impl=impl),
        "trace_batch 200000 points": lambda impl: kernels.trace_batch(
            t, x, side, 1, 1.0, 5.0, -10.0, 1e-6, impl=impl
        ),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = make_rng(0)
    impls = [("python", _kernels_py)]
    if _compiled is not None:
        impls.insert(0, ("cython", _compiled))
    print(f"selected backend: {kernels.BACKEND}")
    print(f"{'kernel':28s} " + " ".join(f"{name:>10s}" for name, _ in impls) + "   speedup")
    for label, fn in cases(rng).items():
        times = [min(timeit.repeat(lambda: fn(impl), number=1, repeat=args.repeat)) for _, impl in impls]
        speed = f"{times[-1] / times[0]:8.1f}x" if len(times) > 1 else "       -"
        print(f"{label:28s} " + " ".join(f"{s:9.3f}s" for s in times) + "  " + speed)


if __name__ == "__main__":
    main()
