#!/usr/bin/env python3
"""Compare the numba and pure-numpy builds of the hot kernels.

Runs the same workload twice in subprocesses -- once as-is and once with
XMGFLOW_DISABLE_NUMBA=1 -- and prints per-kernel timings plus speedup.
Invoke with --lane to run a single lane in-process (used by the driver).
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _workload(reps):
    import numpy as np

    from xmgflow import kernels
    from xmgflow.simulate import make_patterns, simulate
    from xmgflow.xmg import random_netlist

    net = random_netlist(7, num_pis=12, num_ops=2000)
    pats = make_patterns(net.num_pis, seed=1)

    # warm-up compiles the numba kernels so timing excludes JIT cost
    sim = simulate(net, pats)
    t0 = time.perf_counter()
    for _ in range(reps):
        sim = simulate(net, pats)
    t_eval = (time.perf_counter() - t0) / reps

    rng = np.random.default_rng(5)
    n_divs = 400
    divs = rng.choice(np.arange(1, net.num_ids, dtype=np.int64), size=n_divs, replace=False)
    triples = np.stack(np.meshgrid(divs[:60], divs[60:120], divs[120:180]), axis=-1).reshape(-1, 3)
    rem = sim.width % 64
    tail = kernels.FULL if rem == 0 else np.uint64((1 << rem) - 1)
    target = net.num_ids - 1
    # plant the target's own fan-in triple so the scan yields real hits
    own = np.array([[e.target for e in net.node(target).fanins]], dtype=np.int64)
    triples = np.concatenate([triples, own])

    kernels.scan_triples(sim.mat, target, triples[:16], tail, 0, 0, max_hits=8)
    t0 = time.perf_counter()
    hits = None
    for _ in range(reps):
        hits = kernels.scan_triples(sim.mat, target, triples, tail, 0, 0, max_hits=64)
    t_scan = (time.perf_counter() - t0) / reps

    return {
        "numba": kernels.HAS_NUMBA,
        "eval_ms": t_eval * 1e3,
        "scan_ms": t_scan * 1e3,
        "n_triples": int(triples.shape[0]),
        "hits": [[int(t), int(c)] for t, c in hits],
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=5, help="timed repetitions per kernel")
    ap.add_argument("--lane", action="store_true", help="run one lane and emit JSON")
    args = ap.parse_args(argv)

    if args.lane:
        json.dump(_workload(args.reps), sys.stdout)
        return 0

    results = {}
    for name, disable in [("numba", "0"), ("numpy", "1")]:
        env = dict(os.environ, XMGFLOW_DISABLE_NUMBA=disable)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--lane", "--reps", str(args.reps)],
            env=env, capture_output=True, text=True, check=True,
        )
        results[name] = json.loads(out.stdout)

    if results["numba"]["numba"] is not True:
        print("note: numba unavailable; both lanes ran the numpy build")
    assert results["numpy"]["numba"] is False
    if results["numba"]["hits"] != results["numpy"]["hits"]:
        print("LANE MISMATCH: scan hits differ between builds", file=sys.stderr)
        return 1

    print(f"workload: 2000-op netlist, {results['numba']['n_triples']} scan triples, "
          f"reps={args.reps}")
    for key, label in [("eval_ms", "matrix eval"), ("scan_ms", "triple scan")]:
        nb, np_ = results["numba"][key], results["numpy"][key]
        print(f"{label:12s}  numba {nb:8.2f} ms   numpy {np_:8.2f} ms   "
              f"speedup {np_ / nb:5.1f}x")
    print("scan hits identical across lanes:", len(results["numba"]["hits"]))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
