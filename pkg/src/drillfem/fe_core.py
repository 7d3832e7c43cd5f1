"""Reference elements, quadrature rules and the map to physical cells.

The reference square is ``[0, 1]^2`` with vertices ordered
(0,0), (1,0), (1,1), (0,1); the reference triangle has vertices
(0,0), (1,0), (0,1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateCellError
from .mesh import CellKind, Mesh


class ElementKind(enum.Enum):
    P0 = "P0"
    P1 = "P1"
    Q1 = "Q1"


class Purpose(enum.Enum):
    STIFFNESS = "stiffness"
    ERROR = "error"


_N_BASIS = {ElementKind.P0: 1, ElementKind.P1: 3, ElementKind.Q1: 4}


def eval_shape(kind: ElementKind, point) -> tuple[np.ndarray, np.ndarray]:
    """Basis values ``(n_basis,)`` and reference gradients ``(n_basis, 2)``."""
    xi, eta = float(point[0]), float(point[1])
    if kind is ElementKind.P0:
        return np.ones(1), np.zeros((1, 2))
    if kind is ElementKind.P1:
        values = np.array([1.0 - xi - eta, xi, eta])
        grads = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
        return values, grads
    if kind is ElementKind.Q1:
        values = np.array([(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta])
        grads = np.array(
            [
                [-(1 - eta), -(1 - xi)],
                [1 - eta, -xi],
                [eta, xi],
                [-eta, 1 - xi],
            ]
        )
        return values, grads
    raise ValueError(f"unknown element kind {kind!r}")


@dataclass(frozen=True)
class ReferenceElement:
    kind: ElementKind

    @property
    def n_basis(self) -> int:
        return _N_BASIS[self.kind]

    def evaluate(self, point):
        return eval_shape(self.kind, point)

    def tabulate(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values ``(nq, nb)`` and reference gradients ``(nq, nb, 2)``."""
        pairs = [eval_shape(self.kind, p) for p in points]
        return np.array([v for v, _ in pairs]), np.array([g for _, g in pairs])


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)


def _gauss_square(m: int) -> QuadratureRule:
    x, w = np.polynomial.legendre.leggauss(m)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    return QuadratureRule(np.column_stack([X.ravel(), Y.ravel()]), W.ravel())


def _tri3() -> QuadratureRule:
    pts = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]])
    return QuadratureRule(pts, np.full(3, 1 / 6))


def _tri6() -> QuadratureRule:
    # degree-4 symmetric rule (Dunavant), weights scaled to area 1/2
    a, b = 0.445948490915965, 0.091576213509771
    wa, wb = 0.223381589678011, 0.109951743655322
    pts = np.array(
        [
            [a, a], [1 - 2 * a, a], [a, 1 - 2 * a],
            [b, b], [1 - 2 * b, b], [b, 1 - 2 * b],
        ]
    )
    w = 0.5 * np.array([wa, wa, wa, wb, wb, wb])
    return QuadratureRule(pts, w)


@lru_cache(maxsize=None)
def quadrature_for(cell_kind: CellKind, purpose: Purpose = Purpose.STIFFNESS) -> QuadratureRule:
    """2x2 / 3x3 Gauss on quads, 3-point / 6-point symmetric on triangles."""
    if cell_kind is CellKind.QUAD:
        return _gauss_square(2 if purpose is Purpose.STIFFNESS else 3)
    return _tri3() if purpose is Purpose.STIFFNESS else _tri6()


def geometric_element(cell_kind: CellKind) -> ReferenceElement:
    return ReferenceElement(ElementKind.Q1 if cell_kind is CellKind.QUAD else ElementKind.P1)


@dataclass(frozen=True)
class CellGeometry:
    """Jacobian data of one cell at the points of a quadrature rule."""

    ref_points: np.ndarray
    jacobians: np.ndarray
    dets: np.ndarray
    inv_t: np.ndarray
    points: np.ndarray
    weights: np.ndarray

    def physical_gradients(self, ref_grads: np.ndarray) -> np.ndarray:
        """Map ``(nq, nb, 2)`` reference gradients through ``J^{-T}``."""
        return np.einsum("qij,qbj->qbi", self.inv_t, ref_grads)


@dataclass(frozen=True)
class BatchGeometry:
    """Vectorised :class:`CellGeometry` over all cells of a mesh."""

    ref_points: np.ndarray
    dets: np.ndarray  # (M, nq)
    inv_t: np.ndarray  # (M, nq, 2, 2)
    points: np.ndarray  # (M, nq, 2)
    weights: np.ndarray  # (M, nq)

    def physical_gradients(self, ref_grads: np.ndarray) -> np.ndarray:
        """``(M, nq, nb, 2)`` physical gradients from ``(nq, nb, 2)``."""
        return np.einsum("cqij,qbj->cqbi", self.inv_t, ref_grads)

    def cell(self, c: int) -> CellGeometry:
        inv_t = self.inv_t[c]
        return CellGeometry(
            ref_points=self.ref_points,
            jacobians=np.linalg.inv(np.swapaxes(inv_t, 1, 2)),
            dets=self.dets[c],
            inv_t=inv_t,
            points=self.points[c],
            weights=self.weights[c],
        )


def _map(coords: np.ndarray, rule: QuadratureRule, elem: ReferenceElement):
    values, grads = elem.tabulate(rule.points)
    # J[c, q, i, j] = d x_i / d xi_j
    jac = np.einsum("cbi,qbj->cqij", coords, grads)
    det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
    if np.any(det <= 0.0):
        bad = np.unique(np.nonzero(det <= 0.0)[0])
        raise DegenerateCellError(f"non-positive Jacobian determinant in cell(s) {bad.tolist()}")
    inv_t = np.empty_like(jac)
    inv_t[..., 0, 0] = jac[..., 1, 1] / det
    inv_t[..., 1, 1] = jac[..., 0, 0] / det
    inv_t[..., 0, 1] = -jac[..., 1, 0] / det
    inv_t[..., 1, 0] = -jac[..., 0, 1] / det
    points = np.einsum("qb,cbi->cqi", values, coords)
    return jac, det, inv_t, points, det * rule.weights


def map_to_cell(mesh: Mesh, cell_index: int, rule: QuadratureRule) -> CellGeometry:
    if not 0 <= cell_index < mesh.n_cells:
        raise IndexError(f"cell index {cell_index} out of range")
    coords = mesh.nodes[mesh.cells[cell_index]][None]
    jac, det, inv_t, points, weights = _map(coords, rule, geometric_element(mesh.cell_kind))
    return CellGeometry(rule.points, jac[0], det[0], inv_t[0], points[0], weights[0])


def map_cells(mesh: Mesh, rule: QuadratureRule) -> BatchGeometry:
    coords = mesh.nodes[mesh.cells]
    _, det, inv_t, points, weights = _map(coords, rule, geometric_element(mesh.cell_kind))
    return BatchGeometry(rule.points, det, inv_t, points, weights)
