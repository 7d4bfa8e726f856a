"""Time the compiled kernels against the numpy fallback on pipeline-sized inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import timeit

import numpy as np

from mblcavity import _fallback

try:
    from mblcavity import _kernels
except ImportError:  # extension not built
    _kernels = None


def _cases(rng):
    a = rng.normal(size=(108, 108))
    sector = np.tril(a) + np.tril(a, -1).T
    a = rng.normal(size=(300, 300))
    big = np.tril(a) + np.tril(a, -1).T

    # fluxonium finite-difference operator on the default grid
    x = np.linspace(-8 * math.pi, 8 * math.pi, 2001)
    h = x[1] - x[0]
    diag = 16.0 / h ** 2 + 0.695 * x ** 2 - 8.9 * np.cos(x - 2.2)
    off = np.full(2000, -8.0 / h ** 2)

    f_grid = np.linspace(6.9, 7.1, 100001)
    f_res = np.sort(rng.uniform(6.9, 7.1, 100))
    gi = rng.uniform(1e-6, 1e-4, 100)
    ge = rng.uniform(1e-6, 1e-4, 100)

    # secular equation of the hybridization arrowhead: 180 poles, one root per bracket
    d = np.linspace(4.2, 22.0, 180)
    z2 = np.full(180, 0.03)
    origin = np.concatenate([[0], np.arange(180)]).astype(np.int64)
    lo = np.concatenate([[-10.0], np.zeros(180)])
    hi = np.concatenate([[0.0], np.diff(d), [10.0]])
    return {
        "jacobi_eigh 108x108": lambda k: k.jacobi_eigh(sector, 1e-12 * np.linalg.norm(sector), 100),
        "jacobi_eigh 300x300": lambda k: k.jacobi_eigh(big, 1e-12 * np.linalg.norm(big), 100),
        "tridiag_lowest n=2001": lambda k: k.tridiag_lowest(diag, off, 2),
        "s11_product 1e5 x 100": lambda k: k.s11_product(f_grid, f_res, gi, ge),
        "secular_bisect 181 roots": lambda k: k.secular_bisect(6.6, d, z2, origin, lo, hi, 200),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled kernels not built; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'compiled':>12s} {'fallback':>12s} {'speedup':>9s}")
    for name, call in _cases(rng).items():
        times = []
        for mod in (_kernels, _fallback):
            n = 1
            while timeit.timeit(lambda: call(mod), number=n) < 0.2 and n < 1000:
                n *= 2
            times.append(min(timeit.repeat(lambda: call(mod), number=n, repeat=args.repeat)) / n)
        print(f"{name:28s} {times[0] * 1e3:10.3f}ms {times[1] * 1e3:10.3f}ms {times[1] / times[0]:8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
