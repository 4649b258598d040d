"""Compare the numba kernels with the pure-Python fallback.

Each backend runs in its own interpreter (the switch is read at import time):

    python benchmarks/bench_kernels.py            # both backends, table
    python benchmarks/bench_kernels.py --worker   # one backend (internal)

Workloads are sized per backend; times are reported per work unit so the
two columns are comparable.
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def worker(scale):
    from slelab import _accel
    from slelab.domains import HalfPlane
    from slelab.measures import harmonic_measure
    from slelab.rng import RngStream
    from slelab.sle import sample_chordal
    from slelab.stochastic import simulate_theta_endpoints

    n_steps = int(2000 * scale)
    n_walks = int(20000 * scale)
    n_paths = int(200 * scale)
    jobs = {
        "chordal trace (per step)": (lambda: sample_chordal(4.0, 1.0 / n_steps, 1.0, RngStream(1)), n_steps),
        "WoS walk, half-plane (per walk)": (lambda: harmonic_measure(HalfPlane(), 1j, "R-", n_walks, RngStream(2)),
                                            n_walks),
        "theta path, t=1, dt=1e-3 (per path)": (
            lambda: simulate_theta_endpoints(2, 0.5, 1.0, 1.0, n_paths, RngStream(3)), n_paths),
    }
    out = {"backend": _accel.backend_name()}
    for name, (fn, units) in jobs.items():
        fn()  # warm-up (JIT compilation / cache load)
        out[name] = _timed(fn, 3) / units
    print(json.dumps(out))


def run_backend(disable, scale):
    env = dict(os.environ, SLELAB_DISABLE_NUMBA="1" if disable else "0", NUMBA_NUM_THREADS="1")
    proc = subprocess.run([sys.executable, __file__, "--worker", "--scale", str(scale)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--worker", action="store_true")
    ap.add_argument("--scale", type=float, default=1.0)
    ap.add_argument("--python-scale", type=float, default=0.05, help="workload scale for the Python backend")
    args = ap.parse_args()
    if args.worker:
        worker(args.scale)
        return
    jit = run_backend(False, args.scale)
    py = run_backend(True, args.python_scale)
    print(f"{'kernel':40s} {'numba':>12s} {'python':>12s} {'speedup':>9s}")
    for key in jit:
        if key == "backend":
            continue
        print(f"{key:40s} {jit[key] * 1e6:10.2f}us {py[key] * 1e6:10.2f}us {py[key] / jit[key]:8.0f}x")


if __name__ == "__main__":
    main()
