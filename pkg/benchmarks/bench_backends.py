#!/usr/bin/env python3
"""Benchmark: compiled Cython kernels vs the pure-Python (numpy) fallback.

Runs each hot kernel on a representative workload under both backends,
checks that the outputs agree, and prints a throughput table.

    python benchmarks/bench_backends.py [--quick]
"""

import argparse
import time

import numpy as np

from aginglab.backends import available_backends, get_backend
from aginglab.rng import replica_stream


def _time(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_lpp(backend, n):
    kern = get_backend(backend)

    def run():
        rng = replica_stream(1, "bench.lpp", 0)
        w0 = rng.standard_exponential(n + 1, method="inv")
        w0 *= 2.0
        w0[0] = 0.0
        prev = np.cumsum(w0)
        rows = 0
        while rows < n:
            take = min(256, n - rows)
            w = rng.standard_exponential((take, n + 1), method="inv")
            w[:, 0] *= 2.0
            kern.lpp_rows(prev, w)
            rows += take
        return prev[n]

    t, out = _time(run)
    return t, (n + 1) ** 2 / t, out


def bench_tasep(backend, L, t_end):
    kern = get_backend(backend)

    def run():
        rng = replica_stream(2, "bench.tasep", 0)
        occ = rng.integers(0, 2, size=L, dtype=np.uint8)
        sites = np.flatnonzero((occ == 1) & (np.roll(occ, -1) == 0)).astype(np.int64)
        mobile = np.full(L, -1, dtype=np.int64)
        mpos = np.full(L, -1, dtype=np.int64)
        mobile[: sites.size] = sites
        mpos[sites] = np.arange(sites.size)
        bond_idx = np.full(L, -1, dtype=np.int64)
        bond_idx[0] = 0
        flux = np.zeros(1, dtype=np.int64)
        nm, tcur, jumps = int(sites.size), 0.0, 0
        while tcur < t_end:
            exps = rng.standard_exponential(1 << 15, method="inv")
            unis = rng.random(1 << 15)
            nm, tcur, _u, j, done = kern.tasep_chunk(occ, mobile, mpos, nm, tcur, t_end,
                                                     bond_idx, flux, exps, unis)
            jumps += j
            if done:
                break
        return jumps

    t, out = _time(run)
    return t, out / t, out


def bench_polymer(backend, levels, steps):
    kern = get_backend(backend)

    def run():
        rng = replica_stream(3, "bench.polymer", 0)
        logz = np.concatenate([[0.0], np.cumsum(-np.log(rng.gamma(6.157, 1.0, levels)))])
        scratch = np.empty_like(logz)
        done = 0
        while done < steps:
            take = min(1024, steps - done)
            xi = rng.standard_normal((take, levels + 1))
            kern.polymer_steps(logz, scratch, xi, 1e-3, np.sqrt(1e-3), 6.157, 1.0, 1.0)
            done += take
        return logz[-1]

    t, out = _time(run)
    return t, steps * (levels + 1) / t, out


def bench_gl(backend, L, steps):
    kern = get_backend(backend)

    def run():
        rng = replica_stream(4, "bench.gl", 0)
        u = rng.standard_normal(L).cumsum()
        u -= u[0]
        scratch = np.empty_like(u)
        done = 0
        while done < steps:
            take = min(2048, steps - done)
            xi = rng.standard_normal((take, L))
            kern.gl_steps(u, scratch, xi, 1e-3, np.sqrt(1e-3), 0, 0.0)
            done += take
        return u[0]

    t, out = _time(run)
    return t, steps * L / t, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    q = args.quick
    workloads = [
        ("lpp sweep", lambda b: bench_lpp(b, 400 if q else 1500), "cells/s"),
        ("tasep kmc", lambda b: bench_tasep(b, 1024, 5.0 if q else 50.0), "events/s"),
        ("polymer em", lambda b: bench_polymer(b, 128, 500 if q else 5000), "site-steps/s"),
        ("gl em", lambda b: bench_gl(b, 256, 500 if q else 5000), "site-steps/s"),
    ]
    backends = sorted(available_backends())
    print(f"backends available: {backends}")
    header = f"{'kernel':<12}" + "".join(f"{b:>16}" for b in backends) + f"{'speedup':>10}  agreement"
    print(header)
    print("-" * len(header))
    for name, fn, unit in workloads:
        rates, outs, times = {}, {}, {}
        for b in backends:
            times[b], rates[b], outs[b] = fn(b)
        ratio = times.get("python", times[backends[0]]) / times.get("cython", times[backends[-1]])
        vals = list(outs.values())
        agree = max(abs(vals[0] - v) for v in vals) <= 1e-9 * max(1.0, abs(vals[0]))
        cells = "".join(f"{rates[b]:>14.3g}/s" for b in backends)
        print(f"{name:<12}{cells}{ratio:>9.1f}x  {'ok' if agree else 'MISMATCH'} ({unit})")


if __name__ == "__main__":
    main()
