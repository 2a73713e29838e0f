"""Compare the compiled and numpy kernels on the shapes the solver uses.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per (kernel, size, backend) with the best wall time and
checks that both backends return identical results.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from ellbeta.kernels import backends
from ellbeta.lattice import expansion_matrix


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_mul(impls, n, repeat):
    rng = np.random.default_rng(n)
    a = rng.integers(0, 2 ** 63, n, dtype=np.uint64) * np.uint64(2) + np.uint64(1)
    b = rng.integers(0, 2 ** 63, n, dtype=np.uint64)
    results = {}
    for name, mod in impls.items():
        t, out = best_of(lambda: mod.mul_trunc(a, b, n), repeat)
        results[name] = (t, out)
    return results


def bench_eliminate(impls, t, repeat):
    from ellbeta.forms import precision_policy

    prec = precision_policy(t)
    base = expansion_matrix(t, 2 * prec)
    results = {}
    for name, mod in impls.items():
        def run():
            M = base.copy()
            V = np.eye(M.shape[1], dtype=np.uint64)
            rank, perm, prow, vals = mod.eliminate(M, V, 64, prec)
            return rank, np.asarray(vals).copy(), V
        tm, out = best_of(run, repeat)
        results[name] = (tm, out)
    return results


def same(x, y):
    if isinstance(x, tuple):
        return all(same(a, b) for a, b in zip(x, y))
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return np.array_equal(np.asarray(x), np.asarray(y))
    return x == y


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = backends()
    print(f"backends: {', '.join(impls)}")
    rows = []
    for n in (256, 1024, 4096):
        rows.append(("mul_trunc", n, bench_mul(impls, n, args.repeat)))
    for t in (12, 24, 36):
        rows.append(("eliminate", t, bench_eliminate(impls, t, args.repeat)))
    for kernel, size, res in rows:
        outs = [v[1] for v in res.values()]
        agree = all(same(outs[0], o) for o in outs[1:])
        base = res["python"][0]
        for name, (tm, _) in res.items():
            print(f"{kernel:10s} size={size:5d} {name:7s} {tm * 1e3:10.2f} ms  speedup {base / tm:7.1f}x"
                  f"  agree={agree}")


if __name__ == "__main__":
    main()
