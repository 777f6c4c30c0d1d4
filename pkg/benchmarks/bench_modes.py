"""Benchmark the numba-compiled kernels against the numpy fallback.

Runs the same timing payload in two subprocesses, one with
``OSLR_DISABLE_NUMBA=1``, and prints per-workload medians with the speedup
of the compiled path. Compilation happens during warmup, so the numbers
reflect steady-state throughput.

Usage: python benchmarks/bench_modes.py [--repeats N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _payload(repeats: int) -> dict:
    import numpy as np

    from oslr import _kernels
    from oslr._accel import NUMBA_ENABLED
    from oslr.simulation import Scenario, replicate_rng, run_replicate

    rng = np.random.default_rng(20260815)

    fit_times = rng.weibull(1.3, size=500) * 2.0 + 1e-3
    fit_events = (rng.random(500) < 0.7).astype(np.float64)
    comp_times = rng.weibull(1.3, size=10000) * 2.0 + 1e-3
    comp_events = (rng.random(10000) < 0.7).astype(np.float64)
    ts_a = rng.weibull(1.3, size=1000) * 2.0 + 1e-3
    ts_ea = (rng.random(1000) < 0.7).astype(np.float64)
    ts_b = rng.weibull(1.3, size=1000) * 2.0 + 1e-3
    ts_eb = (rng.random(1000) < 0.7).astype(np.float64)
    scenario = Scenario(kappa=1.0, n_b=50, pi=1.0, replicates=1, seed=20260815)

    workloads = {
        "weibull_fit_n500": lambda: _kernels.fit_quasi_newton(
            _kernels.WEIBULL, fit_times, fit_events, 0.0, 0.0, 1e-8, 200
        ),
        "test_components_n10000": lambda: _kernels.oslr_components(
            _kernels.WEIBULL, 1.3, 2.0, comp_times, comp_events, 3.0
        ),
        "two_sample_n2x1000": lambda: _kernels.two_sample_terms(
            ts_a, ts_ea, ts_b, ts_eb
        ),
        "simulation_replicate_nb50": lambda: run_replicate(
            scenario, replicate_rng(20260815, 0)
        ),
    }

    results = {"numba_enabled": NUMBA_ENABLED, "timings": {}}
    for name, fn in workloads.items():
        fn()  # warmup: triggers JIT compilation in the compiled mode
        samples = []
        for _ in range(repeats):
            start = time.perf_counter()
            fn()
            samples.append(time.perf_counter() - start)
        samples.sort()
        results["timings"][name] = samples[len(samples) // 2]
    return results


def _run_mode(disable_numba: bool, repeats: int) -> dict:
    env = dict(os.environ)
    env["OSLR_DISABLE_NUMBA"] = "1" if disable_numba else "0"
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--payload", str(repeats)],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return json.loads(out.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=50)
    parser.add_argument("--payload", type=int, default=None, help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.payload is not None:
        print(json.dumps(_payload(args.payload)))
        return 0

    compiled = _run_mode(False, args.repeats)
    fallback = _run_mode(True, args.repeats)
    if not compiled["numba_enabled"]:
        print("note: numba unavailable; both columns ran the numpy fallback")

    header = f"{'workload':<28} {'numba (ms)':>12} {'numpy (ms)':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, jit_t in compiled["timings"].items():
        plain_t = fallback["timings"][name]
        speedup = plain_t / jit_t if jit_t > 0 else float("inf")
        print(f"{name:<28} {jit_t * 1e3:>12.3f} {plain_t * 1e3:>12.3f} {speedup:>8.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
