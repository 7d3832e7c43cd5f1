"""Global block systems for the standard, mixed and Hughes methods.

All three methods produce the symmetric block matrix::

    [[A,     s B^T],
     [s B,  -s C ]]   with right-hand side  [F, s G]

where ``B`` is ``(n_p, n_u)``. ``s = +1`` for the mixed method
(``A`` from the rearranged form ``a``) and ``s = -1`` for the Hughes method
(``A = K_full + gamma K_cc``, with ``B``, ``C`` and ``G`` scaled by
``gamma / mu``). Both reduce to ``p = C^{-1} (B u - G)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import ConfigurationError, SolverError
from .fe_core import (
    ElementKind,
    Purpose,
    ReferenceElement,
    map_cells,
    quadrature_for,
)
from .forms import LoadSpec, Material, edge_traction, evaluate_scalar, evaluate_vector
from .mesh import CellKind, EdgeTag, Mesh

SOLVER_RTOL = 1e-10


class Method(enum.Enum):
    STANDARD = "standard"
    MIXED = "mixed"
    HUGHES = "hughes"


_V_CELL = {ElementKind.P1: CellKind.TRI, ElementKind.Q1: CellKind.QUAD}


@dataclass(frozen=True)
class MethodConfig:
    method: Method
    v_space: ElementKind
    q_space: Optional[ElementKind] = None
    hughes_gamma: Optional[float] = None

    def __post_init__(self):
        if self.v_space not in _V_CELL:
            raise ConfigurationError(f"displacement space must be P1 or Q1, got {self.v_space}")
        if self.method is Method.STANDARD and self.q_space is not None:
            raise ConfigurationError("the standard method takes no curl space")
        if self.method is not Method.STANDARD and self.q_space is None:
            raise ConfigurationError(f"{self.method.value} method requires a curl space")
        if self.hughes_gamma is not None and not self.hughes_gamma > 0:
            raise ConfigurationError("hughes_gamma must be positive")

    def gamma(self, mat: Material) -> float:
        return mat.mu if self.hughes_gamma is None else self.hughes_gamma


@dataclass(frozen=True)
class CellData:
    """Element blocks kept for element-wise condensation and p recovery."""

    udofs: np.ndarray  # (M, 2nb) global u-DOFs
    pdofs: np.ndarray  # (M, nqb)
    B: np.ndarray  # (M, nqb, 2nb), already scaled like the global B
    C: np.ndarray  # (M, nqb, nqb)
    G: np.ndarray  # (M, nqb)


@dataclass(frozen=True)
class BlockSystem:
    A: sp.spmatrix
    F: np.ndarray
    B: Optional[sp.spmatrix] = None
    C: Optional[sp.spmatrix] = None
    G: Optional[np.ndarray] = None
    sign: int = 1
    constrained: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    free: Optional[np.ndarray] = None
    condensed: bool = False
    cells: Optional[CellData] = None
    mesh: Optional[Mesh] = None
    config: Optional[MethodConfig] = None
    material: Optional[Material] = None

    def __post_init__(self):
        object.__setattr__(self, "A", sp.csr_matrix(self.A))
        object.__setattr__(self, "F", np.asarray(self.F, dtype=float))
        if self.B is not None:
            object.__setattr__(self, "B", sp.csr_matrix(self.B))
            object.__setattr__(self, "C", sp.csr_matrix(self.C))
            g = np.zeros(self.B.shape[0]) if self.G is None else np.asarray(self.G, dtype=float)
            object.__setattr__(self, "G", g)

    @property
    def reduced(self) -> bool:
        return self.free is not None

    @property
    def n_u(self) -> int:
        """Size of the full (unreduced) displacement vector."""
        if self.mesh is not None:
            return 2 * self.mesh.n_nodes
        return self.A.shape[0] if self.free is None else int(self.free.max(initial=-1)) + 1

    @property
    def n_p(self) -> int:
        return 0 if self.B is None else self.B.shape[0]

    def matrix(self) -> sp.csr_matrix:
        if self.B is None:
            return self.A
        s = self.sign
        return sp.bmat([[self.A, s * self.B.T], [s * self.B, -s * self.C]], format="csr")

    def rhs(self) -> np.ndarray:
        if self.B is None:
            return self.F
        return np.concatenate([self.F, self.sign * self.G])


@dataclass(frozen=True)
class FieldSolution:
    u: np.ndarray
    p: np.ndarray
    residual_norm: float


def _check_config(mesh: Mesh, config: MethodConfig):
    if _V_CELL[config.v_space] is not mesh.cell_kind:
        raise ConfigurationError(f"{config.v_space.value} displacements need {_V_CELL[config.v_space].value} cells")
    q = config.q_space
    if q is not None and q is not ElementKind.P0 and _V_CELL[q] is not mesh.cell_kind:
        raise ConfigurationError(f"{q.value} curl space does not fit {mesh.cell_kind.value} cells")


def _scatter(rows: np.ndarray, cols: np.ndarray, blocks: np.ndarray, shape) -> sp.csr_matrix:
    r = np.broadcast_to(rows[:, :, None], blocks.shape).ravel()
    c = np.broadcast_to(cols[:, None, :], blocks.shape).ravel()
    return sp.coo_matrix((blocks.ravel(), (r, c)), shape=shape).tocsr()


def u_dofs(mesh: Mesh) -> np.ndarray:
    """Node-major element DOF table ``(M, 2nb)``."""
    cells = mesh.cells
    out = np.empty((cells.shape[0], 2 * cells.shape[1]), dtype=np.int64)
    out[:, 0::2] = 2 * cells
    out[:, 1::2] = 2 * cells + 1
    return out


def p_dofs(mesh: Mesh, q_space: ElementKind) -> np.ndarray:
    if q_space is ElementKind.P0:
        return np.arange(mesh.n_cells, dtype=np.int64)[:, None]
    return mesh.cells.astype(np.int64)


def assemble_loads(mesh: Mesh, config: MethodConfig, mat: Material, loads: LoadSpec):
    """Global ``F`` and element-wise unscaled ``G`` (``(1/mu) int h q``)."""
    rule = quadrature_for(mesh.cell_kind, Purpose.ERROR)
    geom = map_cells(mesh, rule)
    vals, _ = ReferenceElement(config.v_space).tabulate(rule.points)
    n_u = 2 * mesh.n_nodes
    F = np.zeros(n_u)
    body = loads.body_force()
    if body is not None:
        force = evaluate_vector(body, geom.points)
        fe = np.einsum("cq,qa,cqi->cai", geom.weights, vals, force).reshape(mesh.n_cells, -1)
        np.add.at(F, u_dofs(mesh), fe)
    if loads.traction is not None:
        for i, j in mesh.edges_tagged(EdgeTag.NEUMANN_TRACTION):
            fe = edge_traction(mesh.nodes[i], mesh.nodes[j], loads.traction)
            F[[2 * i, 2 * i + 1, 2 * j, 2 * j + 1]] += fe
    Ge = None
    if config.q_space is not None:
        qvals, _ = ReferenceElement(config.q_space).tabulate(rule.points)
        h = evaluate_scalar(loads.moment_density, geom.points)
        Ge = np.einsum("cq,qb,cq->cb", geom.weights, qvals, h) / mat.mu
    return F, Ge


def assemble(
    mesh: Mesh,
    config: MethodConfig,
    mat: Material,
    loads: LoadSpec | None = None,
    backend: str | None = None,
) -> BlockSystem:
    """Assemble the block system of ``config`` on ``mesh``."""
    _check_config(mesh, config)
    loads = loads or LoadSpec()
    rule = quadrature_for(mesh.cell_kind, Purpose.STIFFNESS)
    geom = map_cells(mesh, rule)
    _, ref_grads = ReferenceElement(config.v_space).tabulate(rule.points)
    grads = geom.physical_gradients(ref_grads)
    if config.q_space is None:
        qvals = np.zeros((len(rule), 0))
    else:
        qvals, _ = ReferenceElement(config.q_space).tabulate(rule.points)
    k_full, k_a, k_cc, b_e, m_e = kernels.element_blocks(
        grads, qvals, geom.weights, mat.lam, mat.mu, backend=backend
    )

    n_u = 2 * mesh.n_nodes
    udofs = u_dofs(mesh)
    F, Ge = assemble_loads(mesh, config, mat, loads)
    constrained = np.sort(np.concatenate([2 * (d := mesh.dirichlet_nodes()), 2 * d + 1]))
    common = dict(constrained=constrained, mesh=mesh, config=config, material=mat)

    if config.method is Method.STANDARD:
        A = _scatter(udofs, udofs, k_full, (n_u, n_u))
        return BlockSystem(A=A, F=F, **common)

    if config.method is Method.MIXED:
        a_e, scale, sign = k_a, 1.0, 1
    else:
        gamma = config.gamma(mat)
        a_e, scale, sign = k_full + gamma * k_cc, gamma / mat.mu, -1
    pdofs = p_dofs(mesh, config.q_space)
    n_p = mesh.n_cells if config.q_space is ElementKind.P0 else mesh.n_nodes
    b_e = scale * b_e
    c_e = scale * m_e / mat.mu
    g_e = scale * Ge
    G = np.zeros(n_p)
    np.add.at(G, pdofs, g_e)
    return BlockSystem(
        A=_scatter(udofs, udofs, a_e, (n_u, n_u)),
        F=F,
        B=_scatter(pdofs, udofs, b_e, (n_p, n_u)),
        C=_scatter(pdofs, pdofs, c_e, (n_p, n_p)),
        G=G,
        sign=sign,
        cells=CellData(udofs, pdofs, b_e, c_e, g_e),
        **common,
    )


def assemble_curl_curl(mesh: Mesh, v_space: ElementKind, backend: str | None = None) -> sp.csr_matrix:
    """Global unit-coefficient ``int curl(u) curl(v)`` matrix."""
    _check_config(mesh, MethodConfig(Method.STANDARD, v_space))
    rule = quadrature_for(mesh.cell_kind, Purpose.STIFFNESS)
    geom = map_cells(mesh, rule)
    _, ref_grads = ReferenceElement(v_space).tabulate(rule.points)
    k_cc = kernels.element_blocks(
        geom.physical_gradients(ref_grads), np.zeros((len(rule), 0)), geom.weights, 0.0, 1.0, backend=backend
    )[2]
    udofs = u_dofs(mesh)
    n_u = 2 * mesh.n_nodes
    return _scatter(udofs, udofs, k_cc, (n_u, n_u))


def apply_dirichlet(sys: BlockSystem) -> BlockSystem:
    """Eliminate the constrained displacement rows and columns.

    Boundary values are homogeneous, so no lifting enters the load. The
    curl unknowns are never constrained.
    """
    if sys.reduced:
        return sys
    n_u = sys.A.shape[0]
    free = np.setdiff1d(np.arange(n_u), sys.constrained)
    if free.size == 0:
        raise ConfigurationError("every displacement DOF is constrained")
    A = sys.A[free][:, free]
    B = None if sys.B is None else sys.B[:, free]
    return replace(sys, A=A, B=B, F=sys.F[free], free=free)


def condense_p(sys: BlockSystem) -> BlockSystem:
    """Eliminate a piecewise-constant curl cell by cell.

    Returns the displacement-only system ``A + s B^T C^{-1} B`` with load
    ``F + s B^T C^{-1} G``.
    """
    if sys.condensed:
        return sys
    cfg = sys.config
    if sys.cells is None or cfg is None or cfg.q_space is not ElementKind.P0:
        raise ConfigurationError("element-wise condensation needs a discontinuous (P0) curl space")
    cd = sys.cells
    c_inv = 1.0 / cd.C[:, 0, 0]
    be = cd.B[:, 0, :]
    k_e = sys.sign * c_inv[:, None, None] * be[:, :, None] * be[:, None, :]
    f_e = sys.sign * (c_inv * cd.G[:, 0])[:, None] * be
    n_u = 2 * sys.mesh.n_nodes
    K = _scatter(cd.udofs, cd.udofs, k_e, (n_u, n_u))
    Fc = np.zeros(n_u)
    np.add.at(Fc, cd.udofs, f_e)
    if sys.reduced:
        K = K[sys.free][:, sys.free]
        Fc = Fc[sys.free]
    return replace(sys, A=sys.A + K, F=sys.F + Fc, B=None, C=None, G=None, condensed=True)


def solve_linear(matrix, rhs) -> tuple[np.ndarray, float]:
    """Sparse LU solve with the residual contract enforced."""
    K = sp.csc_matrix(matrix)
    b = np.asarray(rhs, dtype=float)
    try:
        x = spla.splu(K).solve(b)
    except RuntimeError as exc:
        raise SolverError(f"factorization failed: {exc}") from exc
    residual = float(np.linalg.norm(K @ x - b))
    if not np.isfinite(residual) or residual > SOLVER_RTOL * (1.0 + np.linalg.norm(b)):
        raise SolverError(
            f"residual {residual:.3e} exceeds {SOLVER_RTOL:g} * (1 + |rhs|) = "
            f"{SOLVER_RTOL * (1.0 + np.linalg.norm(b)):.3e}"
        )
    return x, residual


def solve(sys: BlockSystem) -> FieldSolution:
    x, residual = solve_linear(sys.matrix(), sys.rhs())
    n_free = sys.A.shape[0]
    u_red = x[:n_free]
    if sys.reduced:
        u = np.zeros(sys.n_u)
        u[sys.free] = u_red
    else:
        u = u_red
    if sys.condensed:
        cd = sys.cells
        u_e = np.einsum("cbi,ci->cb", cd.B, u[cd.udofs])
        p = np.zeros(sys.mesh.n_cells)
        p[cd.pdofs[:, 0]] = (u_e[:, 0] - cd.G[:, 0]) / cd.C[:, 0, 0]
    else:
        p = x[n_free:]
    return FieldSolution(u=u, p=p, residual_norm=residual)


def solve_problem(
    mesh: Mesh,
    config: MethodConfig,
    mat: Material,
    loads: LoadSpec | None = None,
    condense: bool = False,
) -> FieldSolution:
    """Assemble, constrain, optionally condense, and solve."""
    sys = apply_dirichlet(assemble(mesh, config, mat, loads))
    if condense:
        sys = condense_p(sys)
    return solve(sys)


def stability_probe(sys: BlockSystem) -> float:
    """Smallest over largest absolute eigenvalue of the block matrix.

    Dense; meant for coarse meshes only.
    """
    K = sys.matrix().toarray()
    K = 0.5 * (K + K.T)
    ev = np.abs(scipy.linalg.eigvalsh(K))
    return float(ev.min() / ev.max())
