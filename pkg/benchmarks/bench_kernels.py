#!/usr/bin/env python3
"""Time the compiled and pure-Python element kernels on the same inputs.

    python benchmarks/bench_kernels.py --n 16 32 64 --repeat 3 --out kernels.csv
"""

import argparse
import csv
import sys
import time

import numpy as np

from drillfem import kernels
from drillfem.fe_core import ElementKind, Purpose, ReferenceElement, map_cells, quadrature_for
from drillfem.mesh import build_structured_quad_mesh, build_structured_tri_mesh


def inputs(kind, n):
    if kind == "q1q1":
        mesh, v, q = build_structured_quad_mesh(n), ElementKind.Q1, ElementKind.Q1
    else:
        mesh, v, q = build_structured_tri_mesh(n), ElementKind.P1, ElementKind.P1
    rule = quadrature_for(mesh.cell_kind, Purpose.STIFFNESS)
    geom = map_cells(mesh, rule)
    _, ref_grads = ReferenceElement(v).tabulate(rule.points)
    qvals, _ = ReferenceElement(q).tabulate(rule.points)
    return mesh.n_cells, geom.physical_gradients(ref_grads), qvals, geom.weights


def best_time(backend, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = kernels.element_blocks(*args, 0.5769, 0.3846, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, nargs="+", default=[16, 32, 64])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--out")
    args = p.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; timing the fallback only", file=sys.stderr)

    rows = []
    for kind in ("q1q1", "p1p1"):
        for n in args.n:
            m, *kargs = inputs(kind, n)
            timings, outputs = {}, {}
            for b in backends:
                timings[b], outputs[b] = best_time(b, kargs, args.repeat)
            diff = 0.0
            if len(outputs) == 2:
                diff = max(np.max(np.abs(a - c)) for a, c in zip(outputs["python"], outputs["cython"]))
            speedup = timings["python"] / timings.get("cython", timings["python"])
            rows.append([kind, n, m, f"{timings['python']:.6f}", f"{timings.get('cython', float('nan')):.6f}",
                         f"{speedup:.1f}", f"{diff:.2e}"])
            print(f"{kind:5s} n={n:4d} cells={m:6d}  python {timings['python']:.4f}s  "
                  f"cython {timings.get('cython', float('nan')):.4f}s  x{speedup:.1f}  max|diff| {diff:.1e}")

    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["pair", "n", "cells", "python_s", "cython_s", "speedup", "max_abs_diff"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
