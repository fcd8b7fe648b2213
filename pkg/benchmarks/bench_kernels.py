"""Numba kernels against the numpy fallback.

Each backend runs in its own interpreter, since the choice is fixed at import
time by A3Q_DISABLE_NUMBA.  Timings exclude JIT compilation (one warm-up call
at a small height first).  The direct kernel is only timed up to B = 10^4:
its numpy fallback needs minutes beyond that.

    python benchmarks/bench_kernels.py --heights 1000,10000,100000
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
from a3quartic import _accel, kernels
heights = json.loads(sys.argv[1])
kernels.count_direct_half(10); kernels.count_torsor(10)
out = {"backend": _accel.BACKEND, "rows": []}
for B in heights:
    row = {"B": B}
    for name, fn in (("torsor", kernels.count_torsor), ("direct", kernels.count_direct_half)):
        if name == "direct" and B > 10**4:
            continue
        t = time.perf_counter()
        row[name] = fn(B)
        row[name + "_s"] = time.perf_counter() - t
    out["rows"].append(row)
print(json.dumps(out))
"""


def run_backend(heights, disable):
    env = dict(os.environ)
    env.pop("A3Q_DISABLE_NUMBA", None)
    if disable:
        env["A3Q_DISABLE_NUMBA"] = "1"
    p = subprocess.run([sys.executable, "-c", CHILD, json.dumps(heights)], env=env,
                       capture_output=True, text=True, check=True)
    return json.loads(p.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--heights", default="1000,10000,100000")
    args = ap.parse_args()
    heights = [int(float(x)) for x in args.heights.split(",")]
    fast = run_backend(heights, disable=False)
    slow = run_backend(heights, disable=True)
    print(f"{'B':>9} {'kernel':>7} {fast['backend']:>10} {slow['backend']:>10} {'speedup':>8}")
    for rf, rs in zip(fast["rows"], slow["rows"]):
        for name in ("torsor", "direct"):
            if name not in rf:
                continue
            assert rf[name] == rs[name], f"backends disagree at B={rf['B']} ({name})"
            a, b = rf[name + "_s"], rs[name + "_s"]
            print(f"{rf['B']:>9} {name:>7} {a:>9.3f}s {b:>9.3f}s {b / a:>7.1f}x")


if __name__ == "__main__":
    main()
