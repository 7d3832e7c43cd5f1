"""Drivers for the manufactured-solution and console experiments."""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .analysis import (
    REFERENCE_CONSOLE_ENERGY,
    ErrorReport,
    ErrorRow,
    convergence_rates,
    energy_sigma,
    l2_error_p,
    l2_error_u,
    manufactured,
)
from .errors import ConfigurationError
from .fe_core import ElementKind
from .forms import LoadSpec, Material, from_plane_strain
from .mesh import BoundarySpec, build_structured_quad_mesh, build_structured_tri_mesh, tag_boundary
from .system import Method, MethodConfig, apply_dirichlet, assemble, condense_p, solve

DEFAULT_N_LIST = (8, 16, 32, 64)
TIE_TOL = 1e-12

ELEMENT_PAIRS = {
    "q1": (ElementKind.Q1, None),
    "p1": (ElementKind.P1, None),
    "q1q1": (ElementKind.Q1, ElementKind.Q1),
    "q1p0": (ElementKind.Q1, ElementKind.P0),
    "p1p1": (ElementKind.P1, ElementKind.P1),
    "p1p0": (ElementKind.P1, ElementKind.P0),
}

# comparison set for the console problem
CONSOLE_RUNS = (
    (Method.HUGHES, "p1p1"),
    (Method.STANDARD, "p1"),
    (Method.MIXED, "p1p1"),
    (Method.HUGHES, "q1q1"),
    (Method.STANDARD, "q1"),
    (Method.MIXED, "q1q1"),
    (Method.MIXED, "q1p0"),
)


class Case(enum.Enum):
    MANUFACTURED = "manufactured"
    CONSOLE = "console"


@dataclass(frozen=True)
class Run:
    method: Method
    element: str

    def __post_init__(self):
        if self.element not in ELEMENT_PAIRS:
            raise ConfigurationError(f"unknown element pair {self.element!r}")
        method_config(self.method, self.element)

    @property
    def label(self) -> str:
        return f"{self.method.value}-{self.element}"


@dataclass
class RunConfig:
    case: Case
    runs: list[Run]
    n_list: tuple[int, ...] = DEFAULT_N_LIST
    material: Optional[Material] = None
    out: Optional[Path] = None
    check: bool = False

    def resolved_material(self) -> Material:
        if self.material is not None:
            return self.material
        if self.case is Case.CONSOLE:
            return from_plane_strain(1.0, 0.3)
        return Material(1.0, 1.0)


def method_config(method: Method, element: str) -> MethodConfig:
    v, q = ELEMENT_PAIRS[element]
    return MethodConfig(method, v, q)


def parse_material(text: str) -> Material:
    """``lame:LAM,MU`` / ``plane_strain:E,NU`` (``lame(1,1)`` also accepted)."""
    m = re.fullmatch(r"\s*(lame|plane_strain)\s*[:(]\s*([^,]+),([^)]+)\)?\s*", text)
    if not m:
        raise ConfigurationError(f"cannot parse material {text!r}")
    try:
        a, b = float(m.group(2)), float(m.group(3))
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse material {text!r}") from exc
    return Material(a, b) if m.group(1) == "lame" else from_plane_strain(a, b)


def _mesh(element: str, n: int, spec: BoundarySpec):
    v, _ = ELEMENT_PAIRS[element]
    build = build_structured_quad_mesh if v is ElementKind.Q1 else build_structured_tri_mesh
    return tag_boundary(build(n), spec)


def _solve(mesh, cfg: MethodConfig, mat: Material, loads: LoadSpec):
    sys = apply_dirichlet(assemble(mesh, cfg, mat, loads))
    n_unknowns = sys.A.shape[0] + sys.n_p
    if cfg.q_space is ElementKind.P0:
        sys = condense_p(sys)
    return solve(sys), n_unknowns


def run_manufactured(run: Run, n_list: Sequence[int] = DEFAULT_N_LIST, material: Material | None = None) -> ErrorReport:
    exact = manufactured()
    mat = material or exact.material
    cfg = method_config(run.method, run.element)
    loads = LoadSpec(volume_force=exact.rhs)
    rows = []
    for n in n_list:
        mesh = _mesh(run.element, n, BoundarySpec.clamped())
        sol, dofs = _solve(mesh, cfg, mat, loads)
        err_p = None
        if cfg.q_space is not None:
            err_p = l2_error_p(mesh, sol.p, exact, mu=mat.mu, space=cfg.q_space)
        rows.append(ErrorRow(n=n, err_u=l2_error_u(mesh, sol.u, exact), err_p=err_p, dofs=dofs))
    return convergence_rates(rows)


def run_console(run: Run, n_list: Sequence[int] = DEFAULT_N_LIST, material: Material | None = None) -> list[ErrorRow]:
    mat = material or from_plane_strain(1.0, 0.3)
    cfg = method_config(run.method, run.element)
    loads = LoadSpec(traction=(0.0, -1.0))
    rows = []
    for n in n_list:
        mesh = _mesh(run.element, n, BoundarySpec.console())
        sol, dofs = _solve(mesh, cfg, mat, loads)
        rows.append(ErrorRow(n=n, energy=energy_sigma(mesh, sol.u, mat), dofs=dofs))
    return rows


def _fmt(x: float | None, spec: str = ".15e") -> str:
    return "" if x is None else format(x, spec)


def manufactured_csv(report: ErrorReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "h", "err_u", "rate_u", "err_p", "rate_p"])
    for row, ru, rp in zip(report.rows, report.rate_u, report.rate_p):
        w.writerow([row.n, _fmt(row.h), _fmt(row.err_u), _fmt(ru, ".6f"), _fmt(row.err_p), _fmt(rp, ".6f")])
    return buf.getvalue()


def console_csv(results: dict[Run, list[ErrorRow]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "element", "n", "dofs", "energy"])
    for run, rows in results.items():
        for row in rows:
            w.writerow([run.method.value, run.element, row.n, row.dofs, _fmt(row.energy)])
    w.writerow(["reference", "", "", "", _fmt(REFERENCE_CONSOLE_ENERGY)])
    return buf.getvalue()


def check_manufactured(run: Run, report: ErrorReport) -> list[str]:
    """Failed rate expectations for one manufactured run.

    Hughes runs carry no rate expectation and are only recorded.
    """
    failures = []
    if run.method is Method.HUGHES:
        return failures
    for row, rate in zip(report.rows[1:], report.rate_u[1:]):
        if rate is None or not 1.85 <= rate <= 2.15:
            failures.append(f"{run.label}: displacement rate {rate} at n={row.n} outside [1.85, 2.15]")
    q = ELEMENT_PAIRS[run.element][1]
    last_p = report.rate_p[-1]
    if run.method is Method.MIXED and q is not None:
        floor = 0.9 if q is ElementKind.P0 else 1.8
        if last_p is None or last_p < floor:
            failures.append(f"{run.label}: curl rate {last_p} on the finest pair below {floor}")
    return failures


def _energies(results, method, element):
    for run, rows in results.items():
        if run.method is method and run.element == element:
            return {r.n: r.energy for r in rows}
    return None


def check_console(results: dict[Run, list[ErrorRow]]) -> list[str]:
    """Failed stiffness orderings among the runs present in ``results``."""
    failures = []
    chains = [
        [(Method.HUGHES, "q1q1"), (Method.STANDARD, "q1"), (Method.MIXED, "q1q1")],
        [(Method.MIXED, "q1p0"), (Method.MIXED, "q1q1")],
        [(Method.HUGHES, "p1p1"), (Method.STANDARD, "p1"), (Method.MIXED, "p1p1")],
    ]
    for chain in chains:
        for (m_lo, e_lo), (m_hi, e_hi) in zip(chain, chain[1:]):
            lo, hi = _energies(results, m_lo, e_lo), _energies(results, m_hi, e_hi)
            if lo is None or hi is None:
                continue
            for n in sorted(set(lo) & set(hi)):
                if lo[n] > hi[n] + TIE_TOL:
                    failures.append(
                        f"n={n}: energy {m_lo.value} {e_lo} ({lo[n]:.9f}) > {m_hi.value} {e_hi} ({hi[n]:.9f})"
                    )
    std = _energies(results, Method.STANDARD, "q1")
    if std is not None:
        ns = sorted(std)
        for a, b in zip(ns, ns[1:]):
            if not std[b] > std[a]:
                failures.append(f"standard q1 energy not increasing between n={a} and n={b}")
        for n in ns:
            if std[n] > REFERENCE_CONSOLE_ENERGY:
                failures.append(f"standard q1 energy at n={n} exceeds the reference")
        if 64 in std and abs(std[64] - REFERENCE_CONSOLE_ENERGY) > 0.02 * REFERENCE_CONSOLE_ENERGY:
            failures.append(f"standard q1 energy at n=64 ({std[64]:.6f}) not within 2% of the reference")
    return failures


_PLOT_TEMPLATE = '''\
"""Plots generated by drillfem; run with python and matplotlib installed."""
import csv

import matplotlib.pyplot as plt

REFERENCE_ENERGY = {reference!r}
CSV_FILES = {paths!r}


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


for path in CSV_FILES:
    rows = read(path)
    fig, ax = plt.subplots()
    if rows and "err_u" in rows[0]:
        h = [float(r["h"]) for r in rows]
        ax.loglog(h, [float(r["err_u"]) for r in rows], "o-", label="displacement")
        if all(r["err_p"] for r in rows):
            ax.loglog(h, [float(r["err_p"]) for r in rows], "s--", label="curl")
        ax.loglog(h, [x**2 * float(rows[0]["err_u"]) / h[0] ** 2 for x in h], "k:", label="h^2")
        ax.set_xlabel("h")
        ax.set_ylabel("L2 error")
    else:
        series = {{}}
        for r in rows:
            if r["method"] == "reference":
                continue
            key = r["method"] + " " + r["element"]
            series.setdefault(key, []).append((int(r["n"]), float(r["energy"])))
        for key, pts in series.items():
            ax.semilogx([p[0] for p in pts], [p[1] for p in pts], "o-", label=key)
        ax.axhline(REFERENCE_ENERGY, color="k", ls=":", label="reference")
        ax.set_xlabel("cells per side")
        ax.set_ylabel("energy")
    ax.set_title(path)
    ax.legend()
    fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


def emit_plot_script(csv_paths: Sequence[str | Path], out: str | Path) -> Path:
    """Write a standalone matplotlib script plotting the given CSV files."""
    paths = [str(p) for p in csv_paths]
    if not paths:
        raise ConfigurationError("no CSV files given")
    missing = [p for p in paths if not Path(p).is_file()]
    if missing:
        raise ConfigurationError(f"missing CSV file(s): {', '.join(missing)}")
    out = Path(out)
    out.write_text(_PLOT_TEMPLATE.format(reference=REFERENCE_CONSOLE_ENERGY, paths=paths))
    return out
