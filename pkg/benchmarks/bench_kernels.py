"""Time the hot kernels under numba and under the pure-numpy fallback.

The backend is fixed at import, so each one runs in its own interpreter:

    python benchmarks/bench_kernels.py            # both, side by side
    python benchmarks/bench_kernels.py --worker   # current backend only, JSON
"""
import argparse
import json
import os
import subprocess
import sys
import time


def _best(fn, repeat):
    fn()  # warm-up (and JIT compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def worker(repeat):
    from bilinid import (_kernels, backend, deconv_map, estimate_stability_constant, find_rank2_in_kernel,
                         haar_subspace, random_dense_map)
    from bilinid.numerics import complex_normal, rng

    g = rng(0)
    v, w = complex_normal(g, (256,)), complex_normal(g, (256,))
    T, z = complex_normal(g, (16, 4, 4)), complex_normal(g, (16,))
    u0, v0 = complex_normal(g, (4,)), complex_normal(g, (4,))
    M5 = random_dense_map(4, 4, 5, seed=1)
    M11 = deconv_map(haar_subspace(11, 4, 1), haar_subspace(11, 4, 2))
    cases = {
        "circ_conv_direct m=256": lambda: _kernels.circ_conv_direct(v, w),
        "als_rank_one 200 sweeps": lambda: _kernels.als_rank_one(T, z, u0, v0, 200, 0.0),
        "stability constant M(4,4) m=5": lambda: estimate_stability_constant(M5, 2, 2, restarts=1, max_iters=50),
        "rank-2 kernel search m=11": lambda: find_rank2_in_kernel(M11, restarts=2, seed=0),
    }
    out = {"backend": backend(), "seconds": {k: _best(f, repeat) for k, f in cases.items()}}
    print(json.dumps(out))


def run(disable, repeat):
    env = dict(os.environ, BILINID_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--worker", action="store_true")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if args.worker:
        worker(args.repeat)
        return
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    print(f"{'kernel':34s} {fast['backend']:>10s} {slow['backend']:>10s} {'speedup':>8s}")
    for k, t in fast["seconds"].items():
        s = slow["seconds"][k]
        print(f"{k:34s} {t:10.4f} {s:10.4f} {s / t:8.1f}x")


if __name__ == "__main__":
    main()
