"""Compare the numba kernels against the pure-numpy fallback.

Kernel timings call both kernel sets in-process. The end-to-end fit timing
runs one subprocess per backend, since ``BIADMM_BACKEND`` is read at import.

    python benchmarks/bench_backends.py [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from biadmm import kernels
from biadmm.kernels import NORM_L2, NORM_LINF

FIT_SNIPPET = """
import json, time
import numpy as np
from biadmm import AdmmConfig, CheckerboardSpec, EdgeRecipe, fit, gen_checkerboard, normalize_frobenius
X, _ = gen_checkerboard(CheckerboardSpec(n={n}, p={p}, sigma=4.0, seed=0))
X = normalize_frobenius(X)
rows, cols = EdgeRecipe(phi=0.5, normalize=True, single_gamma=True).build(X)
cfg = AdmmConfig(gamma1=20.0, gamma2=20.0)
fit(X, rows, cols, cfg.with_gammas(0, 0))
best = float("inf")
for _ in range({repeat}):
    t = time.perf_counter()
    res = fit(X, rows, cols, cfg)
    best = min(best, time.perf_counter() - t)
print(json.dumps({{"seconds": best, "iterations": res.iterations}}))
"""


def bench(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_timings(repeat):
    rng = np.random.default_rng(0)
    out = []
    for d in (40, 80, 160):
        B = rng.standard_normal((d, d))
        S = np.ascontiguousarray(B + B.T)

        def eig(mod=None):
            diag, off, Q = mod.tridiagonalize(S.copy())
            mod.tridiagonal_qr(diag, off, Q, 1e-14, 100 * d)

        row = {"kernel": f"eigen d={d}"}
        for name in ("numba", "numpy"):
            mod = kernels.get(name)
            row[name] = bench(lambda: eig(mod), repeat)
        out.append(row)

    n, p, m = 200, 40, 1000
    A = rng.standard_normal((n, p))
    e = rng.choice(n, size=(m, 2))
    e = e[e[:, 0] != e[:, 1]]
    e0, e1 = np.ascontiguousarray(e.min(axis=1)), np.ascontiguousarray(e.max(axis=1))
    sigma = np.abs(rng.standard_normal(len(e0)))
    for code, label in ((NORM_L2, "l2"), (NORM_LINF, "linf")):
        row = {"kernel": f"edge_update {label} |E|={len(e0)}"}
        for name in ("numba", "numpy"):
            mod = kernels.get(name)
            V = np.zeros((len(e0), p))
            L = np.zeros((len(e0), p))
            row[name] = bench(lambda: mod.edge_update(A, e0, e1, V, L, sigma, 8.0, code), repeat)
        out.append(row)
    return out


def fit_timings(repeat, sizes):
    out = []
    for n, p in sizes:
        row = {"kernel": f"fit {n}x{p}"}
        for name in ("numba", "numpy"):
            env = dict(os.environ, BIADMM_BACKEND=name)
            proc = subprocess.run(
                [sys.executable, "-c", FIT_SNIPPET.format(n=n, p=p, repeat=repeat)],
                env=env, capture_output=True, text=True, check=True,
            )
            row[name] = json.loads(proc.stdout)["seconds"]
        out.append(row)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-fit", action="store_true")
    args = ap.parse_args()
    rows = kernel_timings(args.repeat)
    if not args.skip_fit:
        rows += fit_timings(max(1, args.repeat // 2), [(50, 40), (100, 80)])
    print(f"{'case':<28}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for r in rows:
        print(f"{r['kernel']:<28}{1e3 * r['numba']:>12.2f}{1e3 * r['numpy']:>12.2f}{r['numpy'] / r['numba']:>10.1f}")


if __name__ == "__main__":
    main()
