"""Time the propagation loop with and without the compiled kernels.

The parent process launches one worker per configuration (jit on, jit off)
so each import sees its own NLEVEL_NO_NUMBA setting; the compiled path pays
its warm-up before timing starts.  Usage:

    python3 benchmarks/bench_propagation.py [--n 3] [--steps 10000] [--repeats 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def build_problem(n):
    from nlevel import SystemSpec

    energies = tuple(-1.0 + 2.0 * k / (n - 1) for k in range(n))
    spec = SystemSpec(
        n=n, energies=energies, g=0.25, omega=1.0, drive_model="generalized"
    )
    return spec


def run_worker(args):
    from nlevel import EvolutionConfig, evolve, numba_enabled

    spec = build_problem(args.n)
    dt = 0.002
    config = EvolutionConfig(t_start=0.0, t_end=args.steps * dt, dt=dt)

    evolve(spec, config)  # warm-up: jit compile + caches
    timings = []
    for _ in range(args.repeats):
        t0 = time.perf_counter()
        evolve(spec, config)
        timings.append(time.perf_counter() - t0)

    best = min(timings)
    print(json.dumps({
        "jit": numba_enabled(),
        "n": args.n,
        "steps": args.steps,
        "repeats": args.repeats,
        "best_s": best,
        "mean_s": sum(timings) / len(timings),
        "per_step_us": 1e6 * best / args.steps,
    }))
    return 0


def run_parent(args):
    results = []
    for flag in ("0", "1"):
        env = dict(os.environ, NLEVEL_NO_NUMBA=flag)
        cmd = [
            sys.executable, __file__, "--worker",
            "--n", str(args.n),
            "--steps", str(args.steps),
            "--repeats", str(args.repeats),
        ]
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            return proc.returncode
        results.append(json.loads(proc.stdout))

    print(f"propagation benchmark: n = {args.n}, {args.steps} steps, "
          f"best of {args.repeats}")
    for r in results:
        label = "numba kernels" if r["jit"] else "numpy fallback"
        print(f"  {label:<16} {r['best_s']*1e3:10.2f} ms total "
              f"{r['per_step_us']:10.2f} us/step")
    jit, plain = results
    if jit["jit"] and not plain["jit"]:
        print(f"  speedup          {plain['best_s'] / jit['best_s']:10.1f}x")
    else:
        print("  speedup           n/a (compiled kernels unavailable)")
    return 0


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=3, help="system dimension")
    parser.add_argument("--steps", type=int, default=10_000, help="steps per run")
    parser.add_argument("--repeats", type=int, default=3, help="timed repeats")
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    return run_worker(args) if args.worker else run_parent(args)


if __name__ == "__main__":
    sys.exit(main())
