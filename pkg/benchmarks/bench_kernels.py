"""Compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-``repeat`` wall time per kernel for both backends, the
speed-up, and the largest difference between their outputs.
"""

import argparse
import time

import numpy as np

from jacobispec import _kernels_py as py
from jacobispec.jacobi import RandomModel

try:
    from jacobispec import _kernels as cy
except ImportError:  # extension not built
    cy = None


def _best(func, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = func()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _diff(x, y):
    if isinstance(x, tuple):
        return max(_diff(u, v) for u, v in zip(x, y))
    x, y = np.asarray(x), np.asarray(y)
    if x.dtype.kind in "iu":
        return float(np.max(np.abs(x - y)))
    finite = np.isfinite(x) & np.isfinite(y)
    return float(np.max(np.abs(x[finite] - y[finite]), initial=0.0))


def _log_abs(trace):
    # backends may rescale at different steps; compare ln|f| instead
    mant, exps = trace
    with np.errstate(divide="ignore"):
        return np.log(np.abs(mant)) + exps * py.SCALE_EXP * np.log(2.0)


def cases():
    a, b = RandomModel(1, (0.5, 1.5), (-1, 1)).arrays(100_000)
    d, o = b[1:2001], a[1:2000]
    shifts = np.linspace(-4, 4, 2000)
    energies = np.linspace(-3, 3, 200)
    yield "sturm_counts N=2000 x 2000 shifts", lambda k: k.sturm_counts(d, o, shifts)
    yield "bisect_eigenvalues N=2000", lambda k: k.bisect_eigenvalues(d, o, -4.0, 4.0, 1e-12)
    yield "transfer_complex N=100000", lambda k: _log_abs(k.transfer_complex(a, b, 0.3 + 0.1j))
    yield "log_abs_endpoint N=100000 x 200", lambda k: k.log_abs_endpoint(a, b, energies)
    yield "riccati_backward M=100000", lambda k: k.riccati_backward(a, b, 0.3 + 0.5j, 0j)
    yield "riccati_forward N=100000", lambda k: k.riccati_forward(a, b, 0.3 + 0.5j)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    print(f"{'kernel':38s} {'python s':>10s} {'compiled s':>11s} {'speed-up':>9s} {'max diff':>9s}")
    for name, call in cases():
        tp, out_p = _best(lambda: call(py), args.repeat)
        if cy is None:
            print(f"{name:38s} {tp:10.4f} {'-':>11s}")
            continue
        tc, out_c = _best(lambda: call(cy), args.repeat)
        print(f"{name:38s} {tp:10.4f} {tc:11.4f} {tp / tc:8.1f}x {_diff(out_p, out_c):9.1e}")


if __name__ == "__main__":
    main()
