"""Compiled kernels against the pure-Python fallback.

    python3 bench/benchmark.py [--repeat 3] [--json out.json]

Each workload runs on both backends; results must agree, and the table
reports the best wall time of ``--repeat`` runs.
"""
from __future__ import annotations

import argparse
import json
import time

import numpy as np

from eisdensity import _backend
from eisdensity.gf import FieldCtx
from eisdensity.rff import HolomorphySet, parse_divisor, parse_places
from eisdensity.verify import _place_masks


def classify_workload(q, d, kind, ell, n, targets=""):
    ctx = FieldCtx.of_order(q)
    arity = d + 1 if kind == "general" else d
    rng = np.random.default_rng(0)
    samples = rng.integers(0, q, size=(n, arity, ell), dtype=np.int32)
    tgt = [P.poly.coeffs for P in parse_places(ctx, targets)] if targets else []
    label = f"classify q={q} d={d} {kind} ell={ell} n={n}" + (f" T={targets}" if targets else "")
    return label, lambda: _backend.classify_batch(ctx, samples, d, kind == "general", (1,), tgt)


def count_workload(q, deg, d, kind, targets):
    ctx = FieldCtx.of_order(q)
    D = parse_divisor(HolomorphySet.polynomial_ring(ctx), f"{deg}*inf")
    in_p, val1, unit = _place_masks(D, parse_places(ctx, targets))
    masks = [val1] + [in_p] * (d - 1) + ([unit] if kind == "general" else [])
    size = len(val1) ** len(masks)
    return f"count_hits q={q} deg D={deg} d={d} {kind} ({size} tuples)", lambda: _backend.count_hits(masks)


def sieve_workload(q, n):
    ctx = FieldCtx.of_order(q)
    return f"irreducible sieve q={q} n={n}", lambda: int(_backend.irreducible_sieve(ctx, n).sum())


WORKLOADS = [
    lambda: classify_workload(3, 3, "monic", 41, 2000),
    lambda: classify_workload(2, 2, "general", 31, 2000, "(x),(x+1)"),
    lambda: classify_workload(4, 3, "monic", 12, 2000),
    lambda: count_workload(2, 4, 2, "general", "(x)"),
    lambda: count_workload(2, 5, 3, "monic", "(x),(x+1),(x^2+x+1)"),
    lambda: sieve_workload(3, 8),
    lambda: sieve_workload(4, 7),
]


def best_time(fn, repeat):
    best, value = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the results here")
    args = ap.parse_args(argv)
    if "compiled" not in _backend.available():
        raise SystemExit("compiled kernels are not built; run pip install -e . first")
    rows = []
    for make in WORKLOADS:
        label, fn = make()
        with _backend.use("compiled"):
            t_c, v_c = best_time(fn, args.repeat)
        with _backend.use("python"):
            t_p, v_p = best_time(fn, max(1, args.repeat // 3))
        if v_c != v_p:
            raise SystemExit(f"backends disagree on {label}: {v_c} != {v_p}")
        rows.append({"workload": label, "compiled_s": t_c, "python_s": t_p, "speedup": t_p / t_c, "result": v_c})
    width = max(len(r["workload"]) for r in rows)
    print(f"{'workload':<{width}}  {'compiled':>10}  {'python':>10}  {'speedup':>8}")
    for r in rows:
        print(f"{r['workload']:<{width}}  {r['compiled_s']:>9.4f}s  {r['python_s']:>9.4f}s  {r['speedup']:>7.0f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
