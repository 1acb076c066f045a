"""Compare the compiled kernels with the numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--end-to-end B 3]

Kernel timings run in-process against both backends.  The end-to-end run
starts a fresh interpreter per backend (PARASOLV_PURE=1 for the fallback)
and verifies every subset of one algebra in exact mode.
"""
import argparse
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np

from parasolv import exact as ex
from parasolv import _pykernels

try:
    from parasolv import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def structure_like(rng, rows, cols, density=0.05):
    """Sparse small-integer matrix, shaped like a flattened bracket tensor."""
    m = rng.integers(-4, 5, size=(rows, cols))
    m[rng.random((rows, cols)) > density] = 0
    return np.ascontiguousarray(m, dtype=np.int64)


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    cases = {
        "matmul 400x400 @ 400x20 (sparse)": lambda k: k.matmul_i64(a, b),
        "split 40k fractions": lambda k: k.split_fractions(fracs),
        "join 40k integers": lambda k: k.join_fractions(nums, 12),
    }
    a = structure_like(rng, 400, 400)
    b = structure_like(rng, 400, 20, density=0.5)
    fracs = [Fraction(int(p), int(q)) for p, q in zip(rng.integers(-50, 50, 40000), rng.integers(1, 13, 40000))]
    nums = rng.integers(-1000, 1000, 40000).astype(np.int64)
    rows = []
    for name, fn in cases.items():
        py = best_of(lambda: fn(_pykernels), repeat)
        comp = best_of(lambda: fn(_kernels), repeat) if _kernels else float("nan")
        rows.append((name, py, comp))
    return rows


def end_to_end(series, rank):
    code = (
        "import time, parasolv.exact as e\n"
        "from parasolv.pipeline import run, AlgebraSpec\n"
        "from parasolv.parabolic import all_subsets\n"
        f"t = time.perf_counter(); recs = run(AlgebraSpec((({series!r}, {rank}),)), all_subsets({rank}), 'exact')\n"
        "assert all(r.status == 'pass' for r in recs)\n"
        "print(e.BACKEND, time.perf_counter() - t)\n"
    )
    out = {}
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("PARASOLV_PURE", None)
        if pure:
            env["PARASOLV_PURE"] = "1"
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, secs = res.stdout.split()
        out[backend] = float(secs)
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--end-to-end", nargs=2, metavar=("SERIES", "RANK"), default=("B", "3"))
    args = p.parse_args(argv)

    print(f"active backend: {ex.BACKEND}")
    print(f"{'kernel':40s} {'python (s)':>12s} {'compiled (s)':>13s} {'speedup':>8s}")
    for name, py, comp in kernel_table(args.repeat):
        print(f"{name:40s} {py:12.4f} {comp:13.4f} {py / comp:8.1f}x")

    series, rank = args.end_to_end[0].upper(), int(args.end_to_end[1])
    times = end_to_end(series, rank)
    py, comp = times.get("python", float("nan")), times.get("compiled", float("nan"))
    print(f"\nend to end: every subset of {series}{rank}, exact")
    print(f"{'':40s} {py:12.2f} {comp:13.2f} {py / comp:8.1f}x")


if __name__ == "__main__":
    main()
