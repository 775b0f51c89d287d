"""Time the compiled kernels against the numpy fallback.

Each backend runs in its own interpreter (the backend is fixed at import),
so the comparison is ``EPDYN_PURE_PYTHON=0`` vs ``EPDYN_PURE_PYTHON=1``.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from epdyn import kernels
from epdyn.model_one import ModelOneParams
from epdyn.survival import amplitude_contour

repeat = int(sys.argv[1])
a = np.linspace(0.0, 2 * np.pi, 2001)
num, den = np.array([-1.0 + 0j]), np.array([1.0, -1.7321, 0.75], dtype=complex)
x = np.linspace(0.0, 60.0, 200001)
cases = {
    "j0/j1 on 2e5 points": lambda: (kernels.j0(x), kernels.j1(x)),
    "circle panels (2000)": lambda: kernels.circle_panels(num, den, 0.999, 500.0, a[:-1], a[1:]),
    "bessel time panels (2000)": lambda: kernels.bessel_time_panels(
        -2.05 - 1e-3j, np.linspace(0, 300, 2001)[:-1], np.linspace(0, 300, 2001)[1:], 300.0),
    "amplitude, 41 times": lambda: amplitude_contour(
        ModelOneParams(0.5, -1.7321), np.linspace(0.0, 1e3, 41)),
}
out = {"backend": kernels.BACKEND}
for name, fn in cases.items():
    fn()
    out[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
print(json.dumps(out))
"""


def run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ, EPDYN_PURE_PYTHON="1" if pure else "0")
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    if fast["backend"] != "cython":
        print("compiled extension not available; both runs use the numpy fallback")
    print(f"{'case':32s} {fast['backend']:>10s} {'python':>10s} {'speedup':>8s}")
    for key in fast:
        if key == "backend":
            continue
        print(f"{key:32s} {fast[key]:10.4f} {slow[key]:10.4f} {slow[key] / fast[key]:8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
