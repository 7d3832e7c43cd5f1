"""Exact solutions, error norms, the energy functional and convergence rates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .fe_core import ElementKind, Purpose, ReferenceElement, map_cells, quadrature_for
from .forms import Material
from .mesh import CellKind, Mesh
from .system import Method, MethodConfig, assemble

REFERENCE_CONSOLE_ENERGY = 1.903697


@dataclass(frozen=True)
class ExactSolution:
    displacement: Callable[[np.ndarray], np.ndarray]
    curl: Callable[[np.ndarray], np.ndarray]
    rhs: Callable[[np.ndarray], np.ndarray]
    material: Material = Material(1.0, 1.0)


def _u(X):
    x, y = X[..., 0], X[..., 1]
    common = x * y * (1 - x) * (1 - y)
    return np.stack([(y - 0.5) * common, -(x - 0.5) * common], axis=-1)


def _curl(X):
    x, y = X[..., 0], X[..., 1]
    return -0.5 * (
        12 * x**2 * y**2 - 12 * x**2 * y + x**2 - 12 * x * y**2 + 12 * x * y - x + y**2 - y
    )


def _rhs(X):
    # -div sigma(u) for lam = mu = 1
    x, y = X[..., 0], X[..., 1]
    f1 = (2 * y - 1) * (3 * x**2 - 3 * x - 3 * y**2 + 3 * y + 1)
    f2 = (2 * x - 1) * (3 * x**2 - 3 * x - 3 * y**2 + 3 * y - 1)
    return np.stack([f1, f2], axis=-1)


def manufactured() -> ExactSolution:
    """Polynomial displacement vanishing on the unit-square boundary,
    with its curl and body force for ``lam = mu = 1``."""
    return ExactSolution(displacement=_u, curl=_curl, rhs=_rhs)


def _as_field(exact, attr):
    return getattr(exact, attr) if hasattr(exact, attr) else exact


def interpolate(mesh: Mesh, func) -> np.ndarray:
    """Nodal interpolant, node-major for vector fields."""
    return np.asarray(func(mesh.nodes), dtype=float).ravel()


def cell_averages(mesh: Mesh, func) -> np.ndarray:
    rule = quadrature_for(mesh.cell_kind, Purpose.ERROR)
    geom = map_cells(mesh, rule)
    vals = np.asarray(func(geom.points), dtype=float)
    return np.sum(geom.weights * vals, axis=1) / np.sum(geom.weights, axis=1)


def _v_kind(mesh: Mesh) -> ElementKind:
    return ElementKind.Q1 if mesh.cell_kind is CellKind.QUAD else ElementKind.P1


def l2_error_u(mesh: Mesh, u_coeffs, exact) -> float:
    """``||u_h - u||_{L2}`` with the ERROR quadrature rule."""
    rule = quadrature_for(mesh.cell_kind, Purpose.ERROR)
    geom = map_cells(mesh, rule)
    vals, _ = ReferenceElement(_v_kind(mesh)).tabulate(rule.points)
    u = np.asarray(u_coeffs, dtype=float).reshape(-1, 2)[mesh.cells]  # (M, nb, 2)
    uh = np.einsum("qb,cbi->cqi", vals, u)
    diff = uh - _as_field(exact, "displacement")(geom.points)
    return float(np.sqrt(np.sum(geom.weights * np.sum(diff**2, axis=-1))))


def l2_error_p(mesh: Mesh, p_coeffs, exact, mu: float = 1.0, space: ElementKind | None = None) -> float:
    """``||p_h - mu * curl(u)||_{L2}``.

    ``space`` defaults to P0 when there is one coefficient per cell and to
    the nodal space of the mesh otherwise.
    """
    p = np.asarray(p_coeffs, dtype=float)
    if space is None:
        space = ElementKind.P0 if p.size == mesh.n_cells else _v_kind(mesh)
    rule = quadrature_for(mesh.cell_kind, Purpose.ERROR)
    geom = map_cells(mesh, rule)
    if space is ElementKind.P0:
        ph = np.broadcast_to(p[:, None], geom.weights.shape)
    else:
        vals, _ = ReferenceElement(space).tabulate(rule.points)
        ph = p[mesh.cells] @ vals.T
    diff = ph - mu * _as_field(exact, "curl")(geom.points)
    return float(np.sqrt(np.sum(geom.weights * diff**2)))


def energy_sigma(mesh: Mesh, u_coeffs, mat: Material) -> float:
    """``int sigma(u_h) : eps(u_h)`` as the quadratic form of assembled K_full."""
    u = np.asarray(u_coeffs, dtype=float)
    K = assemble(mesh, MethodConfig(Method.STANDARD, _v_kind(mesh)), mat).A
    return float(u @ (K @ u))


def energy_sigma_quadrature(mesh: Mesh, u_coeffs, mat: Material) -> float:
    """Direct ERROR-rule quadrature of ``sigma(u_h) : eps(u_h)``."""
    rule = quadrature_for(mesh.cell_kind, Purpose.ERROR)
    geom = map_cells(mesh, rule)
    _, ref_grads = ReferenceElement(_v_kind(mesh)).tabulate(rule.points)
    grads = geom.physical_gradients(ref_grads)  # (M, nq, nb, 2)
    u = np.asarray(u_coeffs, dtype=float).reshape(-1, 2)[mesh.cells]
    gu = np.einsum("cbi,cqbj->cqij", u, grads)
    eps = 0.5 * (gu + np.swapaxes(gu, -1, -2))
    tr = eps[..., 0, 0] + eps[..., 1, 1]
    dens = 2 * mat.mu * np.sum(eps * eps, axis=(-1, -2)) + mat.lam * tr**2
    return float(np.sum(geom.weights * dens))


@dataclass
class ErrorRow:
    n: int
    err_u: Optional[float] = None
    err_p: Optional[float] = None
    energy: Optional[float] = None
    dofs: Optional[int] = None

    @property
    def h(self) -> float:
        return 1.0 / self.n


@dataclass
class ErrorReport:
    rows: list[ErrorRow]
    rate_u: list[Optional[float]] = field(default_factory=list)
    rate_p: list[Optional[float]] = field(default_factory=list)


def _rate(e_coarse, e_fine, h_coarse, h_fine) -> Optional[float]:
    if e_coarse is None or e_fine is None or e_coarse <= 0 or e_fine <= 0:
        return None
    return math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine)


def convergence_rates(rows: Sequence[ErrorRow]) -> ErrorReport:
    """Observed orders between consecutive rows, sorted by decreasing ``h``.

    ``rate_u[k]`` belongs to the pair ``(rows[k-1], rows[k])``; the first
    entry is always ``None``.
    """
    if len(rows) < 2:
        raise ValueError("need at least two rows to compute rates")
    rows = sorted(rows, key=lambda r: r.h, reverse=True)
    report = ErrorReport(rows=list(rows), rate_u=[None], rate_p=[None])
    for prev, cur in zip(rows, rows[1:]):
        report.rate_u.append(_rate(prev.err_u, cur.err_u, prev.h, cur.h))
        report.rate_p.append(_rate(prev.err_p, cur.err_p, prev.h, cur.h))
    return report
