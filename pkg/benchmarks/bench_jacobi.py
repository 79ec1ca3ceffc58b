"""Compare the compiled and pure-Python cyclic Jacobi kernels.

Run: python3 benchmarks/bench_jacobi.py [--sizes 16,32,64] [--repeat 3]
Prints one line per (size, backend) with the best wall time, the speedup
over the Python kernel and the largest eigenvalue difference between backends.
"""

import argparse
import time

import numpy as np

from cmv_spectral.linalg import _kernels
from cmv_spectral.linalg.core import _KERNEL_TOL, _MAX_SWEEPS


def random_hermitian(n, rng):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (X + X.conj().T)


def run_kernel(kernel, A):
    work = np.ascontiguousarray(A.copy())
    V = np.eye(A.shape[0], dtype=np.complex128)
    t = time.perf_counter()
    sweeps = kernel(work, V, _KERNEL_TOL, _MAX_SWEEPS)
    dt = time.perf_counter() - t
    return dt, np.sort(np.real(np.diagonal(work))), sweeps


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="16,32,64,128")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    kernels = _kernels.backends()
    if "compiled" not in kernels:
        print("compiled kernel unavailable; only the Python backend will be timed")
    rng = np.random.default_rng(args.seed)
    print(f"{'n':>5} {'backend':>9} {'best_s':>10} {'speedup':>8} {'sweeps':>6} {'max_eig_diff':>13}")
    rows = []
    for n in (int(s) for s in args.sizes.split(",")):
        A = random_hermitian(n, rng)
        ref = np.linalg.eigvalsh(A)
        res = {}
        for name, k in kernels.items():
            best = min(run_kernel(k, A)[0] for _ in range(args.repeat))
            _, vals, sweeps = run_kernel(k, A)
            res[name] = (best, vals, sweeps)
        base = res["python"][0]
        for name, (best, vals, sweeps) in res.items():
            diff = float(np.abs(vals - res["python"][1]).max())
            print(f"{n:>5} {name:>9} {best:>10.4g} {base / best:>8.1f} {sweeps:>6} {diff:>13.2e}")
            rows.append((n, name, best, float(np.abs(vals - ref).max())))
    return rows


if __name__ == "__main__":
    main()
