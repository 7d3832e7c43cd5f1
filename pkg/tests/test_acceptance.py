"""Exit criteria. Each test prints one PASS/FAIL line in the terminal summary."""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from drillfem import cli
from drillfem.analysis import REFERENCE_CONSOLE_ENERGY
from drillfem.bench import DEFAULT_N_LIST, TIE_TOL, Run, run_console, run_manufactured
from drillfem.fe_core import ElementKind as EK
from drillfem.fe_core import ReferenceElement, map_to_cell, quadrature_for
from drillfem.forms import LoadSpec, Material, elem_K_a, elem_K_cc, elem_K_full, from_plane_strain, strain_identity_residual
from drillfem.mesh import BoundarySpec, build_structured_quad_mesh, build_structured_tri_mesh, tag_boundary
from drillfem.system import (
    Method,
    MethodConfig,
    apply_dirichlet,
    assemble,
    assemble_curl_curl,
    condense_p,
    solve,
    stability_probe,
)

CONSOLE_MAT = from_plane_strain(1.0, 0.3)
CONSOLE_LOADS = LoadSpec(traction=(0.0, -1.0))


def record(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}")
    assert ok, detail


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


@pytest.fixture(scope="module")
def manufactured_reports():
    runs = [
        Run(Method.STANDARD, "q1"),
        Run(Method.MIXED, "q1q1"),
        Run(Method.MIXED, "q1p0"),
        Run(Method.STANDARD, "p1"),
        Run(Method.MIXED, "p1p1"),
    ]
    with Timer() as t:
        reports = {run: run_manufactured(run, (8, 16, 32, 64)) for run in runs}
    return reports, t.elapsed


@pytest.fixture(scope="module")
def console_energies():
    runs = [
        Run(Method.HUGHES, "q1q1"), Run(Method.STANDARD, "q1"), Run(Method.MIXED, "q1q1"),
        Run(Method.HUGHES, "p1p1"), Run(Method.STANDARD, "p1"), Run(Method.MIXED, "p1p1"),
    ]
    return {run: {r.n: r.energy for r in run_console(run, DEFAULT_N_LIST, CONSOLE_MAT)} for run in runs}


def test_01_pointwise_identity():
    rng = np.random.default_rng(2024)
    with Timer() as t:
        worst = 0.0
        for d in (2, 3):
            for _ in range(1000):
                gu, gv = rng.uniform(-1, 1, (2, d, d))
                worst = max(worst, abs(strain_identity_residual(gu, gv, d)))
    record(1, "strain rearrangement identity, d=2,3", worst < 1e-12 and t.elapsed < 1.0,
           f"max residual {worst:.2e} (< 1e-12), {t.elapsed:.2f}s (< 1s)")


def test_02_discrete_identity():
    rng = np.random.default_rng(7)
    worst = 0.0
    with Timer() as t:
        for _ in range(5):
            mat = Material(rng.uniform(0, 10), rng.uniform(0.01, 10))
            for mesh, v, q in [(build_structured_quad_mesh(6), EK.Q1, EK.Q1), (build_structured_tri_mesh(6), EK.P1, EK.P1)]:
                elem = ReferenceElement(v)
                rule = quadrature_for(mesh.cell_kind)
                for c in range(mesh.n_cells):
                    g = map_to_cell(mesh, c, rule)
                    K = elem_K_full(g, elem, mat)
                    diff = K - (elem_K_a(g, elem, mat) + mat.mu * elem_K_cc(g, elem))
                    worst = max(worst, np.abs(diff).max() / np.abs(K).max())
                std = assemble(mesh, MethodConfig(Method.STANDARD, v), mat).A
                mix = assemble(mesh, MethodConfig(Method.MIXED, v, q), mat).A
                diff = std - (mix + mat.mu * assemble_curl_curl(mesh, v))
                worst = max(worst, abs(diff).max() / abs(std).max())
    record(2, "discrete identity A_standard = A_mixed + mu K_cc", worst < 1e-12 and t.elapsed < 5.0,
           f"max relative deviation {worst:.2e} (< 1e-12), {t.elapsed:.2f}s (< 5s)")


def test_03_p1p0_equivalence():
    worst = 0.0
    with Timer() as t:
        for n in (4, 8, 16):
            mesh = tag_boundary(build_structured_tri_mesh(n), BoundarySpec.console())
            std = solve(apply_dirichlet(assemble(mesh, MethodConfig(Method.STANDARD, EK.P1), CONSOLE_MAT, CONSOLE_LOADS))).u
            full = apply_dirichlet(assemble(mesh, MethodConfig(Method.MIXED, EK.P1, EK.P0), CONSOLE_MAT, CONSOLE_LOADS))
            for u in (solve(full).u, solve(condense_p(full)).u):
                worst = max(worst, np.linalg.norm(u - std) / np.linalg.norm(std))
    record(3, "MIXED P1P0 (full and condensed) equals STANDARD P1", worst < 1e-9 and t.elapsed < 10.0,
           f"max relative difference {worst:.2e} (< 1e-9), {t.elapsed:.2f}s (< 10s)")


def test_04_displacement_rates(manufactured_reports):
    reports, elapsed = manufactured_reports
    parts, ok = [], elapsed < 60.0
    for run, rep in reports.items():
        rates = rep.rate_u[1:]
        ok &= all(r is not None and 1.85 <= r <= 2.15 for r in rates)
        parts.append(f"{run.label} " + "/".join(f"{r:.3f}" for r in rates))
    record(4, "L2 displacement rates in [1.85, 2.15]", ok, "; ".join(parts) + f"; {elapsed:.1f}s (< 60s)")


def test_05_curl_rates(manufactured_reports):
    reports, _ = manufactured_reports
    q1q1 = reports[Run(Method.MIXED, "q1q1")].rate_p[-1]
    q1p0 = reports[Run(Method.MIXED, "q1p0")].rate_p[-1]
    record(5, "curl rates on the finest pair", q1q1 >= 1.8 and q1p0 >= 0.9,
           f"Q1Q1 {q1q1:.3f} (>= 1.8), Q1P0 {q1p0:.3f} (>= 0.9)")


def test_06_console_energy(console_energies):
    e = console_energies[Run(Method.STANDARD, "q1")]
    ns = sorted(e)
    monotone = all(e[a] < e[b] for a, b in zip(ns, ns[1:]))
    gap = abs(e[64] - REFERENCE_CONSOLE_ENERGY) / REFERENCE_CONSOLE_ENERGY
    record(6, "STANDARD Q1 console energy", monotone and gap <= 0.02,
           "energies " + ", ".join(f"n={n}: {e[n]:.6f}" for n in ns) + f"; n=64 gap {100 * gap:.3f}% (<= 2%)")


def test_07_stiffness_ordering(console_energies):
    e = {(r.method, r.element): v for r, v in console_energies.items()}
    bad = []
    for family, (h, s, m) in {"Q1": ("q1q1", "q1", "q1q1"), "P1": ("p1p1", "p1", "p1p1")}.items():
        for n in DEFAULT_N_LIST:
            eh, es, em = e[(Method.HUGHES, h)][n], e[(Method.STANDARD, s)][n], e[(Method.MIXED, m)][n]
            if not (eh <= es + TIE_TOL and es <= em + TIE_TOL):
                bad.append(f"{family} n={n}: {eh:.6f}, {es:.6f}, {em:.6f}")
    record(7, "HUGHES <= STANDARD <= MIXED energy at every n", not bad,
           "all orderings hold" if not bad else "; ".join(bad))


def test_08_projection_property():
    worst = 0.0
    cases = [
        (build_structured_quad_mesh, EK.Q1, EK.Q1),
        (build_structured_quad_mesh, EK.Q1, EK.P0),
        (build_structured_tri_mesh, EK.P1, EK.P1),
        (build_structured_tri_mesh, EK.P1, EK.P0),
    ]
    for build, v, q in cases:
        for spec, mat, loads in [
            (BoundarySpec.console(), CONSOLE_MAT, CONSOLE_LOADS),
            (BoundarySpec.clamped(), Material(1.0, 1.0), LoadSpec(volume_force=lambda X: np.stack([X[..., 1], -X[..., 0] ** 2], -1))),
        ]:
            sys = apply_dirichlet(assemble(tag_boundary(build(8), spec), MethodConfig(Method.MIXED, v, q), mat, loads))
            sol = solve(sys)
            Bu = sys.B @ sol.u[sys.free]
            worst = max(worst, np.linalg.norm(sys.C @ sol.p - Bu) / np.linalg.norm(Bu))
    record(8, "projection C p = B u for unsplit loads", worst <= 1e-10, f"max relative residual {worst:.2e} (<= 1e-10)")


def test_09_stability_probe():
    values = {}
    for label, build, v in [("Q1Q1", build_structured_quad_mesh, EK.Q1), ("P1P1", build_structured_tri_mesh, EK.P1)]:
        for n in (2, 4, 8):
            mesh = tag_boundary(build(n), BoundarySpec.console())
            values[(label, n)] = stability_probe(apply_dirichlet(assemble(mesh, MethodConfig(Method.MIXED, v, v), CONSOLE_MAT)))
    floating = stability_probe(assemble(build_structured_quad_mesh(4), MethodConfig(Method.STANDARD, EK.Q1), CONSOLE_MAT))
    ok = min(values.values()) > 1e-8 and floating < 1e-12
    record(9, "stability probe", ok,
           ", ".join(f"{k[0]} n={k[1]}: {x:.2e}" for k, x in values.items()) + f"; unconstrained standard {floating:.1e}")


def test_10_determinism(tmp_path):
    outputs = []
    for i in range(2):
        c, m = tmp_path / f"c{i}.csv", tmp_path / f"m{i}.csv"
        assert cli.main(["--case", "console", "--out", str(c)]) == 0
        assert cli.main(["--case", "manufactured", "--element", "q1q1", "--out", str(m)]) == 0
        outputs.append((c.read_bytes(), m.read_bytes()))
    record(10, "byte-identical CSVs across repeated runs", outputs[0] == outputs[1],
           f"console {len(outputs[0][0])} bytes, manufactured {len(outputs[0][1])} bytes")
