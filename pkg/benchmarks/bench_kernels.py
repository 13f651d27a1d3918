"""Compare the compiled kernels with the pure-Python fallback.

Kernel timings call both backends directly on the same random graphs.
Pipeline timings run the same workload in two subprocesses, one with
``TRACESYNTH_PURE=1``, so every layer above the kernels is included.

    python3 benchmarks/bench_kernels.py [--sizes 1000 10000] [--repeat 3]
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time
from array import array

from tracesynth import _kernels_py

try:
    from tracesynth import _kernels as compiled
except ImportError:
    compiled = None

PIPELINE = r"""
import json, sys, time
from tracesynth import kernels
from tracesynth.asyncauto import global_automaton_bounded, bounded_language
from tracesynth.automata import enumerate_projected
from tracesynth.harness import run_pipeline
from tracesynth.instances import generate_instance
from tracesynth.synthesis import Internal, build_extended

out = {"backend": kernels.BACKEND}
for seed in map(int, sys.argv[1:]):
    inst = generate_instance(seed)
    p = run_pipeline(inst, 3000)
    t = time.perf_counter()
    G = global_automaton_bounded(build_extended(p.unfolding, inst.distribution), 100_000)
    t1 = time.perf_counter()
    hidden = [x for x in G.actions if isinstance(x, Internal)]
    enumerate_projected(G, 6, hidden)
    t2 = time.perf_counter()
    bounded_language(p.bundle.async_automaton, 6)
    t3 = time.perf_counter()
    out[seed] = {"global_states": len(G.states), "expand": t1 - t, "project": t2 - t1, "language": t3 - t2}
print(json.dumps(out))
"""


def random_csr(n: int, degree: int, n_actions: int, rng: random.Random):
    indptr, labels, targets = array("q", [0]), array("q"), array("q")
    for _ in range(n):
        for _ in range(rng.randint(0, 2 * degree)):
            labels.append(rng.randrange(n_actions))
            targets.append(rng.randrange(n))
        indptr.append(len(targets))
    return indptr, labels, targets


def best_of(repeat: int, fn) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench_kernels(sizes, repeat: int) -> None:
    rng = random.Random(0)
    print(f"{'kernel':<14}{'n':>8}{'python s':>12}{'compiled s':>12}{'speedup':>9}")
    for n in sizes:
        csr = random_csr(n, 3, 4, rng)
        allowed = bytes([1, 1, 0, 1])
        frontier = [tuple(sorted(rng.sample(range(n), 8))) for _ in range(2000)]
        work = {
            "reach": lambda m, c=csr: [m.reach(*c, allowed, [s]) for s in range(0, n, max(1, n // 200))],
            "layer_images": lambda m, c=csr: m.layer_images(*c, frontier, 4),
        }
        if n <= 5000:
            work["reach_masks"] = lambda m, c=csr: m.reach_masks(*c, allowed)
        for name, fn in work.items():
            py = best_of(repeat, lambda: fn(_kernels_py))
            if compiled is None:
                print(f"{name:<14}{n:>8}{py:>12.4f}{'n/a':>12}{'':>9}")
                continue
            assert fn(_kernels_py) == fn(compiled), name
            cy = best_of(repeat, lambda: fn(compiled))
            print(f"{name:<14}{n:>8}{py:>12.4f}{cy:>12.4f}{py / cy:>8.1f}x")


def bench_pipeline(seeds) -> None:
    results = {}
    for pure in ("1", ""):
        env = dict(os.environ)
        env.pop("TRACESYNTH_PURE", None)
        if pure:
            env["TRACESYNTH_PURE"] = pure
        proc = subprocess.run([sys.executable, "-c", PIPELINE, *map(str, seeds)],
                              capture_output=True, text=True, env=env, check=True)
        data = json.loads(proc.stdout)
        results[data.pop("backend")] = data
    print(f"\n{'seed':>5}{'global':>9}  {'stage':<9}" + "".join(f"{b + ' s':>12}" for b in results))
    for seed in map(str, seeds):
        first = next(iter(results.values()))[seed]
        for stage in ("expand", "project", "language"):
            cells = "".join(f"{results[b][seed][stage]:>12.4f}" for b in results)
            print(f"{seed:>5}{first['global_states']:>9}  {stage:<9}{cells}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[1000, 10000, 100000])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seeds", type=int, nargs="+", default=[7, 35, 57])
    args = parser.parse_args()
    bench_kernels(args.sizes, args.repeat)
    bench_pipeline(args.seeds)


if __name__ == "__main__":
    main()
