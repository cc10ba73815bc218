"""Compare the numba-compiled LP kernels with the pure-numpy fallback.

Each mode runs in a fresh interpreter because the switch is read at import
time.  Usage: ``python benchmarks/bench_lp.py [--repeat 5]``.
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
import rangesmf
from rangesmf.config import load_config
from rangesmf.sim import run_episode
from rangesmf.zonotope import contains_points, interval_hull, make_zonotope

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
G = rng.normal(size=(4, 8))
A = rng.normal(size=(3, 8))
Z = make_zonotope(G, np.zeros(4), A, A @ rng.uniform(-0.5, 0.5, 8))
X = rng.uniform(-3, 3, size=(2000, 4))
cfg = load_config("paper_sec4")

def best(fn):
    fn()  # warm-up (compilation, caches)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out

t_mem, inside = best(lambda: contains_points(Z, X))
t_hull, hull = best(lambda: [interval_hull(Z) for _ in range(50)][-1])
t_ep, log = best(lambda: run_episode(cfg, 1))
print(json.dumps({
    "numba": rangesmf.NUMBA_ACTIVE,
    "membership_2000": t_mem,
    "hull_x50": t_hull,
    "episode": t_ep,
    "inside": int(inside.sum()),
    "hull": hull.hi.tolist(),
    "post_hi": log.records[-1].post_hi,
}))
"""


def run(disable, repeat):
    env = dict(os.environ)
    env.pop("RANGESMF_DISABLE_NUMBA", None)
    if disable:
        env["RANGESMF_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    jit, ref = run(False, args.repeat), run(True, args.repeat)
    if not jit["numba"]:
        print("numba unavailable: both runs used the numpy path")
    print(f"{'workload':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for key, label in (("membership_2000", "2000 membership LPs"), ("hull_x50", "50 interval hulls"),
                       ("episode", "one 40-step episode")):
        print(f"{label:<22}{jit[key]:>12.4f}{ref[key]:>12.4f}{ref[key] / jit[key]:>9.1f}x")
    agree = (jit["inside"] == ref["inside"]
             and max(abs(a - b) for a, b in zip(jit["hull"], ref["hull"])) < 1e-9
             and max(abs(a - b) for a, b in zip(jit["post_hi"], ref["post_hi"])) < 1e-9)
    print("results agree" if agree else "RESULTS DIFFER")
    return 0 if agree else 1


if __name__ == "__main__":
    sys.exit(main())
