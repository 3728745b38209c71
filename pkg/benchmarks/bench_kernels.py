"""Time each hot kernel on its numba path and its numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Both paths are called directly (``*_numba`` / ``*_numpy``), so the
CATALYTIC_LAB_NUMBA flag does not matter here.  Outputs are cross-checked
before timing.
"""

import argparse
import json
import time
from itertools import combinations

import numpy as np

from catalytic_lab import _kernels as K


def _cases(rng):
    m = 12
    mask = rng.random(1 << m) < 0.3
    points = np.flatnonzero(mask).astype(np.int64)
    m_proj = 16
    proj_points = rng.choice(1 << m_proj, size=3000, replace=False).astype(np.int64)
    tmasks = np.array([sum(1 << i for i in T) for T in combinations(range(m_proj), 8)], dtype=np.int64)
    sub_m = 10
    sub_mask = rng.random(1 << sub_m) < 0.6
    compat_mask = rng.random(1 << 8) < 0.7
    compat_points = np.flatnonzero(compat_mask).astype(np.int64)
    values = rng.integers(-1, 2, size=1 << 18).astype(np.int64)
    rows = rng.integers(0, 1 << 40, size=16).astype(np.int64)
    pow3 = K._pow3(sub_m)
    return [
        ("popcount 2^20", lambda: K.popcount_numba(np.arange(1 << 20)), lambda: K.popcount_numpy(np.arange(1 << 20))),
        ("fwht 2^18", lambda: K.fwht_numba(values), lambda: K.fwht_numpy(values)),
        ("distance_transform m=12", lambda: K.distance_transform_numba(mask, m),
         lambda: K.distance_transform_numpy(mask, m)),
        ("span_ints k=16", lambda: K.span_ints_numba(rows), lambda: K.span_ints_numpy(rows)),
        ("subcube_tables m=10", lambda: K.subcube_tables_numba(sub_mask, sub_m, pow3),
         lambda: K.subcube_tables_numpy(sub_mask, sub_m)),
        ("projection_counts m=16 l=8", lambda: K.projection_counts_numba(proj_points, tmasks, m_proj),
         lambda: K.projection_counts_numpy(proj_points, tmasks)),
        ("compatibility m=8", lambda: K.compatibility_numba(compat_points, compat_mask),
         lambda: K.compatibility_numpy(compat_points, compat_mask)),
    ]


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    if not K._HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 1
    rng = np.random.default_rng(args.seed)
    rows = []
    print(f"{'kernel':30s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, fast, slow in _cases(rng):
        if not _same(fast(), slow()):  # also warms up the JIT
            raise SystemExit(f"{name}: backends disagree")
        tf, ts = _best(fast, args.repeat), _best(slow, args.repeat)
        rows.append({"kernel": name, "numba_s": tf, "numpy_s": ts, "speedup": ts / tf if tf else None})
        print(f"{name:30s} {tf * 1e3:10.2f} {ts * 1e3:10.2f} {ts / tf:8.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
