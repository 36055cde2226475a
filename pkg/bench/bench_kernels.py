"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs both backend variants of every kernel on identical inputs, checks they
agree, and prints a timing table. The numba variants are JIT-compiled on a
small warm-up call before timing.

Usage: python bench/bench_kernels.py [--repeat N]
"""

import argparse
import math
import time

import numpy as np

from carmkit import _kernels as K

parser = argparse.ArgumentParser()
parser.add_argument("--repeat", type=int, default=3)
args = parser.parse_args()

if not K.USING_NUMBA:
    print("numba backend unavailable (CARMKIT_KERNELS=numpy or numba not installed);")
    print("only the numpy path can be timed. Re-run with CARMKIT_KERNELS=auto.")
    raise SystemExit(1)


def best_of(fn, *a):
    times = []
    for _ in range(args.repeat):
        t0 = time.perf_counter()
        out = fn(*a)
        times.append(time.perf_counter() - t0)
    return min(times), out


def row(name, t_np, t_nb):
    speedup = t_np / t_nb if t_nb > 0 else float("inf")
    print(f"{name:34} {t_np * 1e3:10.2f} {t_nb * 1e3:10.2f} {speedup:9.1f}x")


print(f"{'kernel':34} {'numpy ms':>10} {'numba ms':>10} {'speedup':>10}")
print("-" * 68)

# --- largest-prime-factor window ---
lo, hi = 1, 2_000_000
base = K.sieve_primes(math.isqrt(hi))
K._lpf_range_loops(1, 100, base)  # warm up JIT
t_np, out_np = best_of(K._lpf_range_numpy, lo, hi, base)
t_nb, out_nb = best_of(K._lpf_range_loops, lo, hi, base)
assert np.array_equal(out_np, out_nb)
row(f"lpf_range [{lo}, {hi}]", t_np, t_nb)

# --- Carmichael segment scan ---
limit = 4_000_000
odd_primes = K.sieve_primes(math.isqrt(limit - 1))[1:]
K._carmichael_segment_loops(3, 1001, odd_primes)
t_np, out_np = best_of(K._carmichael_segment_numpy, 3, limit, odd_primes)
t_nb, out_nb = best_of(K._carmichael_segment_loops, 3, limit, odd_primes)
assert np.array_equal(out_np.astype(np.uint8), out_nb)
row(f"carmichael_segment [3, {limit})", t_np, t_nb)

# --- subset-product reachability DP ---
rng = np.random.default_rng(1)
m = 2520
units = np.array([u for u in range(1, m) if math.gcd(u, m) == 1], dtype=np.int64)
res = rng.choice(units, size=64)
inv = np.array([pow(int(r), -1, m) for r in res], dtype=np.int64)
K._dp_reach_loops(res[:4], inv[:4], m, 4, True, 1)
t_np, out_np = best_of(K._dp_reach_numpy, res, inv, m, 4, True, 1)
t_nb, out_nb = best_of(K._dp_reach_loops, res, inv, m, 4, True, 1)
assert np.array_equal(out_np, out_nb)
row(f"dp_reach n=64 m={m}", t_np, t_nb)

# --- exhaustive subset products ---
res22 = rng.choice(units, size=22)
K._all_products_loops(res22[:4], m)
t_np, out_np = best_of(K._all_products_numpy, res22, m)
t_nb, out_nb = best_of(K._all_products_loops, res22, m)
assert np.array_equal(out_np[0], out_nb[0]) and np.array_equal(out_np[1], out_nb[1])
row("all_subset_products n=22", t_np, t_nb)
