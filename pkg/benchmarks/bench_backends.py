"""Compare the numba kernels with the pure-numpy fallback.

    python benchmarks/bench_backends.py            # kernels at several N, then a full run
    python benchmarks/bench_backends.py --quick

Both backends are always importable; the EPIFUZZ_DISABLE_NUMBA flag only
changes the default, so one process can time both. Results are checked for
equality before timings are reported.
"""
import argparse
import time
from dataclasses import astuple, replace

import numpy as np

from epifuzz import engine
from epifuzz._backend import HAS_NUMBA
from epifuzz.engine import ScenarioConfig, init_world
from epifuzz.spatial import neighbors_within_naive


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def half_infected_world(n, backend):
    cfg = ScenarioConfig(n_agents=n, world=(200.0 * (n / 20000) ** 0.5,) * 2, initial_infected=n // 2, seed=3)
    state = init_world(cfg, backend=backend)
    engine.move_agents(state, 1)
    state.index = engine.rebuild_index(state.pop.position.copy(), engine._cell_size(cfg), cfg.world)
    return state


def naive_exposure_count(state):
    """O(N^2) all-pairs contact count, for scale only."""
    p = state.pop
    pos = state.index.positions
    inf = np.flatnonzero(p.state == engine.INFECTED)
    return sum(len(neighbors_within_naive(pos, pos[j], state.config.radius, state.config.world)) for j in inf)


def bench_kernels(sizes, repeat, backends):
    print(f"{'N':>8} {'kernel':<10} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for n in sizes:
        times = {"move": {}, "exposures": {}}
        results = {}
        for b in backends:
            state = half_infected_world(n, b)
            engine.collect_exposures(state, 2)  # compile outside the timer
            times["exposures"][b], results[b] = best_of(lambda: engine.collect_exposures(state, 2), repeat)

            def mv():
                s = state.copy()
                engine.move_agents(s, 2)
                return s.pop.position

            mv()
            times["move"][b], _ = best_of(mv, repeat)
        if len(backends) == 2:
            a, c = (results[b] for b in backends)
            assert all(np.array_equal(x, y) for x, y in zip(a, c)), "backends disagree"
        for k, row in times.items():
            cells = " ".join(f"{row[b] * 1e3:9.2f}ms" for b in backends)
            ratio = f"{row['numpy'] / row['numba']:8.1f}x" if len(backends) == 2 else ""
            print(f"{n:>8} {k:<10} {cells} {ratio}")
        if n <= 2000:
            state = half_infected_world(n, backends[-1])
            t, _ = best_of(lambda: naive_exposure_count(state), 1)
            print(f"{n:>8} {'naive':<10} {t * 1e3:9.2f}ms  (all-pairs reference)")


def bench_run(cfg, backends):
    print(f"\nfull run, {cfg.n_agents} agents, seed {cfg.seed}")
    summaries = {}
    for b in backends:
        engine.run(replace(cfg, n_agents=500, max_days=3), backend=b)
        t, ts = best_of(lambda: engine.run(cfg, backend=b), 1)
        summaries[b] = [astuple(r) for r in ts]
        print(f"  {b:<6} {len(ts) - 1:4d} days  {t:6.2f}s")
    if len(backends) == 2:
        print("  identical series:", summaries["numba"] == summaries["numpy"])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="small sizes and a 2,000 agent run")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numba", "numpy"] if HAS_NUMBA else ["numpy"]
    sizes = [1000, 5000] if args.quick else [1000, 5000, 20000, 100000]
    bench_kernels(sizes, args.repeat, backends)
    bench_run(ScenarioConfig(n_agents=2000 if args.quick else 20000), backends)


if __name__ == "__main__":
    main()
