"""Time the numba and numpy versions of the two hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

The first numba call compiles (or loads the on-disk cache); it is timed
separately and excluded from the per-call figures.
"""
import argparse
import json
import time

import numpy as np

from darbouxheat import _kernels
from darbouxheat._accel import HAVE_NUMBA
from darbouxheat.quadrature import panel_nodes


def hermite_case(batch=400, panels=32):
    rng = np.random.default_rng(0)
    x = rng.uniform(-3.0, 3.0, batch)
    z, w = panel_nodes(x - 8.0, x + 8.0, panels)
    f = np.cosh(0.7 * z) / np.cosh(0.7 * x[:, None])
    return (x, z, w, f, 0.4, 2)


def cn_case(n=12000, steps=1000):
    r = 20.0
    x = np.linspace(-30.0, 30.0, n)
    u = 1.5 / np.cosh(x / np.sqrt(2.0)) ** 2
    dt = 5e-4
    lhs_diag = 1.0 + r - 0.5 * dt * u
    rhs_diag = 1.0 - r + 0.5 * dt * u
    lhs_off = np.full(n - 1, -0.5 * r)
    rhs_off = np.full(n - 1, 0.5 * r)
    v = np.exp(-x * x)
    return (lhs_diag, lhs_off, rhs_diag, rhs_off, v, steps)


def best_of(func, args, repeat):
    times = []
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = func(*args)
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", default=None, help="also write results here")
    args = parser.parse_args(argv)

    cases = {
        "hermite_gaussian_sums": (_kernels._hermite_gaussian_sums_np,
                                  _kernels._hermite_gaussian_sums_nb, hermite_case()),
        "cn_march": (_kernels._cn_march_np, _kernels._cn_march_nb, cn_case()),
    }
    results = {}
    for name, (np_func, nb_func, case) in cases.items():
        copy = lambda: tuple(a.copy() if isinstance(a, np.ndarray) else a for a in case)
        t_np, ref = best_of(np_func, copy(), args.repeat)
        row = {"numpy_s": t_np}
        if HAVE_NUMBA:
            start = time.perf_counter()
            nb_func(*copy())
            row["numba_first_call_s"] = time.perf_counter() - start
            t_nb, out = best_of(nb_func, copy(), args.repeat)
            row["numba_s"] = t_nb
            row["speedup"] = t_np / t_nb
            row["max_abs_diff"] = float(max(np.max(np.abs(np.asarray(a) - np.asarray(b)))
                                            for a, b in zip(np.atleast_1d(ref), np.atleast_1d(out))))
        results[name] = row
        line = f"{name:<24s} numpy {t_np * 1e3:9.2f} ms"
        if HAVE_NUMBA:
            line += (f"   numba {row['numba_s'] * 1e3:9.2f} ms   x{row['speedup']:6.1f}"
                     f"   first call {row['numba_first_call_s']:.2f} s   diff {row['max_abs_diff']:.1e}")
        print(line)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
