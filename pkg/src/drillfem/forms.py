"""Element-level bilinear and linear forms.

The curl unknown ``p`` is the moment density ``mu * curl(u) - h``. With
that scaling the forms are::

    a(u, v) = int 2 mu (sum_i du_i/dx_i dv_i/dx_i + sum_{i!=j} du_i/dx_j dv_j/dx_i)
              + lam div(u) div(v)
    b(p, v) = int p curl(v)
    c(p, q) = (1/mu) int p q
    f(v)    = int f . v + int_{Gamma_N} g . v     (or int grad(phi) . v)
    g(q)    = (1/mu) int h q

and at ``mu = 1`` they coincide with the unscaled forms. Eliminating ``p``
recovers ``a + mu * (curl, curl)``, i.e. the usual elasticity form.

Split loads: the pair ``(grad(phi), h)`` represents the body force
``f = grad(phi) + (dh/dx2, -dh/dx1)``. With that sign the split right-hand
side reproduces the unsplit one (an integration by parts of ``int h curl(v)``
for ``v`` vanishing on the boundary where ``h`` does not).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._kernels_py import cell_blocks, curl_vectors
from .errors import ConfigurationError
from .fe_core import CellGeometry, ReferenceElement

VectorField = Callable[[np.ndarray], np.ndarray]
ScalarField = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Material:
    lam: float
    mu: float

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ConfigurationError(f"shear modulus must be positive, got {self.mu}")
        if not self.lam >= 0.0:
            raise ConfigurationError(f"lambda must be non-negative, got {self.lam}")


def from_plane_strain(E: float, nu: float) -> Material:
    """Lamé pair of an isotropic material in plane strain."""
    if not E > 0.0:
        raise ConfigurationError(f"Young's modulus must be positive, got {E}")
    if nu >= 0.5:
        raise ConfigurationError(f"Poisson ratio {nu} is at or beyond the incompressible limit")
    if nu < 0.0:
        raise ConfigurationError(f"Poisson ratio must be non-negative, got {nu}")
    return Material(lam=E * nu / ((1 + nu) * (1 - 2 * nu)), mu=E / (2 * (1 + nu)))


@dataclass(frozen=True)
class LoadSpec:
    """Right-hand side data.

    Either ``volume_force`` (unsplit) or the pair ``potential_gradient``
    (the field ``grad(phi)``) / ``moment_density`` (``h``) drives the body
    load. ``traction`` acts on NEUMANN_TRACTION edges. Callables take points
    of shape ``(..., 2)``; a constant may be given instead of a callable for
    the vector fields.
    """

    volume_force: Optional[VectorField] = None
    traction: Optional[VectorField | tuple] = None
    moment_density: Optional[ScalarField] = None
    potential_gradient: Optional[VectorField] = None

    def __post_init__(self):
        split = self.moment_density is not None or self.potential_gradient is not None
        if split and self.volume_force is not None:
            raise ConfigurationError("volume_force and split (phi, h) loads are mutually exclusive")

    @property
    def is_split(self) -> bool:
        return self.moment_density is not None or self.potential_gradient is not None

    def body_force(self) -> Optional[VectorField]:
        return self.potential_gradient if self.is_split else self.volume_force


def evaluate_vector(field, points: np.ndarray) -> np.ndarray:
    if field is None:
        return np.zeros(points.shape)
    if callable(field):
        return np.broadcast_to(np.asarray(field(points), dtype=float), points.shape)
    return np.broadcast_to(np.asarray(field, dtype=float), points.shape)


def evaluate_scalar(field, points: np.ndarray) -> np.ndarray:
    if field is None:
        return np.zeros(points.shape[:-1])
    if callable(field):
        return np.broadcast_to(np.asarray(field(points), dtype=float), points.shape[:-1])
    return np.full(points.shape[:-1], float(field))


def strain_identity_residual(grad_u, grad_v, d: int | None = None) -> float:
    """``eps(u):eps(v)`` minus its curl-isolating rearrangement.

    ``grad_u[i, j] = du_i/dx_j``. The rearrangement is
    ``1/2 curl(u).curl(v) + sum_i du_i/dx_i dv_i/dx_i
    + sum_{i!=j} du_i/dx_j dv_j/dx_i``; in 2D the curl is the scalar
    ``du_2/dx_1 - du_1/dx_2``.
    """
    gu = np.asarray(grad_u, dtype=float)
    gv = np.asarray(grad_v, dtype=float)
    d = gu.shape[0] if d is None else d
    if d not in (2, 3) or gu.shape != (d, d) or gv.shape != (d, d):
        raise ValueError("gradients must be 2x2 or 3x3")
    eu = 0.5 * (gu + gu.T)
    ev = 0.5 * (gv + gv.T)
    lhs = np.sum(eu * ev)

    def curl(g):
        if d == 2:
            return np.array([g[1, 0] - g[0, 1]])
        return np.array([g[2, 1] - g[1, 2], g[0, 2] - g[2, 0], g[1, 0] - g[0, 1]])

    diag = np.sum(np.diag(gu) * np.diag(gv))
    off = np.sum(gu * gv.T) - diag  # sum_{i!=j} gu[i,j] gv[j,i]
    rhs = 0.5 * curl(gu) @ curl(gv) + diag + off
    return float(lhs - rhs)


def _blocks(geom: CellGeometry, v_elem: ReferenceElement, q_elem=None, mat=None):
    _, ref_grads = v_elem.tabulate(geom.ref_points)
    grads = geom.physical_gradients(ref_grads)
    if q_elem is None:
        qvals = np.zeros((len(geom.weights), 0))
    else:
        qvals, _ = q_elem.tabulate(geom.ref_points)
    lam, mu = (mat.lam, mat.mu) if mat is not None else (0.0, 1.0)
    return cell_blocks(grads, qvals, geom.weights, lam, mu)


def elem_K_full(geom: CellGeometry, elem: ReferenceElement, mat: Material) -> np.ndarray:
    """``int 2 mu eps(u):eps(v) + lam div(u) div(v)`` on one cell."""
    return _blocks(geom, elem, mat=mat)[0]


def elem_K_a(geom: CellGeometry, elem: ReferenceElement, mat: Material) -> np.ndarray:
    """Element matrix of the rearranged form ``a``."""
    return _blocks(geom, elem, mat=mat)[1]


def elem_K_cc(geom: CellGeometry, elem: ReferenceElement) -> np.ndarray:
    """``int curl(u) curl(v)`` with unit coefficient."""
    return _blocks(geom, elem)[2]


def elem_B(geom: CellGeometry, v_elem: ReferenceElement, q_elem: ReferenceElement) -> np.ndarray:
    """``int q curl(v)``, shape ``(n_q_basis, 2 * n_v_basis)``."""
    return _blocks(geom, v_elem, q_elem)[3]


def elem_C(geom: CellGeometry, q_elem: ReferenceElement, mat: Material) -> np.ndarray:
    """``(1/mu) int p q``."""
    qvals, _ = q_elem.tabulate(geom.ref_points)
    return np.einsum("q,qa,qb->ab", geom.weights, qvals, qvals) / mat.mu


def elem_curls(geom: CellGeometry, elem: ReferenceElement) -> np.ndarray:
    """Curl of every element DOF field at the quadrature points, ``(nq, 2nb)``."""
    _, ref_grads = elem.tabulate(geom.ref_points)
    return curl_vectors(geom.physical_gradients(ref_grads))


_EDGE_GAUSS = (0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0))


def edge_traction(x0, x1, traction) -> np.ndarray:
    """``int_edge g . v`` for the two endpoint nodes, ordered ``(u1, u2)`` per
    node; 2-point Gauss along the straight edge with linear traces."""
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    length = np.linalg.norm(x1 - x0)
    out = np.zeros(4)
    for s in _EDGE_GAUSS:
        g = evaluate_vector(traction, (x0 + s * (x1 - x0))[None])[0]
        out[0:2] += 0.5 * length * (1 - s) * g
        out[2:4] += 0.5 * length * s * g
    return out


def elem_loads(
    geom: CellGeometry,
    v_elem: ReferenceElement,
    q_elem: ReferenceElement | None,
    loads: LoadSpec,
    mat: Material,
    edge=None,
):
    """Element load vectors ``(F_vol, F_trac, G_mom)``.

    ``edge`` is an optional pair of endpoint coordinates of a traction edge
    of this cell; ``F_trac`` then holds the loads of its two end nodes.
    """
    vals, _ = v_elem.tabulate(geom.ref_points)
    force = evaluate_vector(loads.body_force(), geom.points)
    f_vol = np.einsum("q,qa,qi->ai", geom.weights, vals, force).ravel()
    f_trac = np.zeros(4)
    if edge is not None and loads.traction is not None:
        f_trac = edge_traction(edge[0], edge[1], loads.traction)
    if q_elem is None:
        g_mom = np.zeros(0)
    else:
        qvals, _ = q_elem.tabulate(geom.ref_points)
        h = evaluate_scalar(loads.moment_density, geom.points)
        g_mom = np.einsum("q,qb,q->b", geom.weights, qvals, h) / mat.mu
    return f_vol, f_trac, g_mom
