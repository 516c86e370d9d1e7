"""Compare the compiled kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--json]

Micro-benchmarks call both implementations in-process; the end-to-end rows
run a full check in a subprocess per backend so ``kernels.BACKEND`` is
selected exactly as in normal use.
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from radonhgf import _kernels_py

try:
    from radonhgf import _kernels as _kernels_ext
except ImportError:
    _kernels_ext = None


def _poly(rng, nterms, nvars=6, maxexp=3):
    out = {}
    for _ in range(nterms):
        vs = sorted(rng.choice(np.arange(1, nvars + 1), size=rng.integers(1, 4), replace=False))
        mono = tuple(x for v in vs for x in (int(v), int(rng.integers(1, maxexp + 1))))
        out[mono] = int(rng.integers(-9, 10)) or 1
    return out


def micro_cases():
    rng = np.random.default_rng(0)
    a, b = _poly(rng, 60), _poly(rng, 60)
    ja = rng.normal(size=16) + 1j * rng.normal(size=16)
    jb = rng.normal(size=16) + 1j * rng.normal(size=16)
    x, w = np.linspace(0.1, 3.0, 32), np.linspace(1.0, 0.1, 32)
    ma, mb = tuple(next(iter(a))), tuple(next(iter(b)))
    return {
        "mono_mul": lambda k: k.mono_mul(ma, mb),
        "poly_mul 60x60": lambda k: k.poly_mul(a, b),
        "poly_add_scaled": lambda k: k.poly_add_scaled(dict(a), b, 3),
        "jet_mul d=4": lambda k: k.jet_mul(ja, jb),
        "grid_sum n=32 r=3": lambda k: k.grid_sum(x, w, 3),
    }


END_TO_END = {
    "cayley r=4": "from radonhgf.weyl import cayley_check; cayley_check(4)",
    "capelli r=4": "from radonhgf.weyl import capelli_check; capelli_check(4, max_r=None)",
    "nonconf r=2 m=4": "from radonhgf.contiguity import check_nonconf_integrand as c; c(2, 4, 1, 2)",
    "conf (2,2) r=2": "from radonhgf.contiguity import check_conf_integrand as c; c((2, 2), 2, 4, 1, 2, trials=20)",
}


def _best(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def _subprocess_time(code, pure, repeat):
    env = dict(os.environ)
    env.pop("RADONHGF_PURE_PYTHON", None)
    if pure:
        env["RADONHGF_PURE_PYTHON"] = "1"
    script = f"import time; t = time.perf_counter(); {code}; print(time.perf_counter() - t)"
    runs = [
        float(subprocess.run([sys.executable, "-c", script], env=env, capture_output=True, text=True, check=True).stdout)
        for _ in range(repeat)
    ]
    return min(runs)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--json", action="store_true")
    args = p.parse_args(argv)
    rows = []
    for name, fn in micro_cases().items():
        py = _best(lambda: fn(_kernels_py), args.repeat)
        ext = _best(lambda: fn(_kernels_ext), args.repeat) if _kernels_ext else None
        rows.append({"case": name, "python_s": py, "compiled_s": ext})
    for name, code in END_TO_END.items():
        py = _subprocess_time(code, True, args.repeat)
        ext = _subprocess_time(code, False, args.repeat) if _kernels_ext else None
        rows.append({"case": name, "python_s": py, "compiled_s": ext})
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'case':<22}{'python':>14}{'compiled':>14}{'speedup':>10}")
    for row in rows:
        ext = row["compiled_s"]
        speed = f"{row['python_s'] / ext:9.2f}x" if ext else "      n/a"
        ext_s = f"{ext:14.3e}" if ext else f"{'n/a':>14}"
        print(f"{row['case']:<22}{row['python_s']:14.3e}{ext_s}{speed}")


if __name__ == "__main__":
    main()
