"""Structured meshes of the unit square and boundary tagging."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigurationError


class CellKind(enum.Enum):
    QUAD = "quad"
    TRI = "tri"


class EdgeTag(enum.Enum):
    DIRICHLET = "DIRICHLET"
    NEUMANN_TRACTION = "NEUMANN_TRACTION"
    NEUMANN_FREE = "NEUMANN_FREE"


@dataclass(frozen=True)
class Mesh:
    """Nodes, cells and tagged boundary edges of a 2D mesh.

    ``cells`` holds counterclockwise node indices (4 per quad, 3 per
    triangle). ``boundary_edges`` is an ``(E, 2)`` array of node pairs
    oriented counterclockwise along the boundary, so the outward normal is
    to the right of each edge; ``edge_cells`` gives the owning cell.
    """

    nodes: np.ndarray
    cells: np.ndarray
    cell_kind: CellKind
    boundary_edges: np.ndarray
    edge_cells: np.ndarray
    edge_tags: tuple[EdgeTag, ...]
    dim: int = 2

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    def cell_areas(self) -> np.ndarray:
        """Signed cell areas by the shoelace formula."""
        xy = self.nodes[self.cells]
        x, y = xy[..., 0], xy[..., 1]
        return 0.5 * np.sum(x * np.roll(y, -1, axis=1) - np.roll(x, -1, axis=1) * y, axis=1)

    def edges_tagged(self, tag: EdgeTag) -> np.ndarray:
        mask = np.array([t is tag for t in self.edge_tags], dtype=bool)
        return self.boundary_edges[mask]

    def dirichlet_nodes(self) -> np.ndarray:
        """Sorted indices of nodes touching a DIRICHLET edge."""
        return np.unique(self.edges_tagged(EdgeTag.DIRICHLET))


def _lattice(n: int):
    if int(n) != n or n < 1:
        raise ConfigurationError(f"mesh size must be a positive integer, got {n!r}")
    n = int(n)
    t = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(t, t)  # row j is y = j/n
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    j, i = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    ll = (j * (n + 1) + i).ravel()  # lower-left node of every square
    return n, nodes, ll


def _boundary_edges(n: int, cell_of_square) -> tuple[np.ndarray, np.ndarray]:
    """Counterclockwise boundary edges: bottom, right, top, left."""
    m = n + 1
    k = np.arange(n)
    edges = np.concatenate(
        [
            np.column_stack([k, k + 1]),  # y = 0
            np.column_stack([k * m + n, (k + 1) * m + n]),  # x = 1
            np.column_stack([n * m + n - k, n * m + n - k - 1]),  # y = 1
            np.column_stack([(n - k) * m, (n - k - 1) * m]),  # x = 0
        ]
    )
    squares = np.concatenate(
        [
            k,
            k * n + (n - 1),
            (n - 1) * n + (n - 1 - k),
            (n - 1 - k) * n,
        ]
    )
    sides = np.repeat(np.arange(4), n)
    return edges, cell_of_square(squares, sides)


def build_structured_quad_mesh(n: int) -> Mesh:
    """Uniform ``n x n`` grid of square Q1 cells on the unit square."""
    n, nodes, ll = _lattice(n)
    m = n + 1
    cells = np.column_stack([ll, ll + 1, ll + m + 1, ll + m])
    edges, owners = _boundary_edges(n, lambda sq, side: sq)
    return Mesh(
        nodes=nodes,
        cells=cells,
        cell_kind=CellKind.QUAD,
        boundary_edges=edges,
        edge_cells=owners,
        edge_tags=(EdgeTag.NEUMANN_FREE,) * len(edges),
    )


def build_structured_tri_mesh(n: int) -> Mesh:
    """Unit-square lattice with every square split along its lower-left to
    upper-right diagonal into two triangles.

    Square ``s`` yields cells ``2s`` (below the diagonal) and ``2s + 1``.
    """
    n, nodes, ll = _lattice(n)
    m = n + 1
    lower = np.column_stack([ll, ll + 1, ll + m + 1])
    upper = np.column_stack([ll, ll + m + 1, ll + m])
    cells = np.empty((2 * len(ll), 3), dtype=ll.dtype)
    cells[0::2] = lower
    cells[1::2] = upper
    # bottom and right sides belong to the lower triangle, top and left to the upper
    edges, owners = _boundary_edges(n, lambda sq, side: 2 * sq + (side >= 2))
    return Mesh(
        nodes=nodes,
        cells=cells,
        cell_kind=CellKind.TRI,
        boundary_edges=edges,
        edge_cells=owners,
        edge_tags=(EdgeTag.NEUMANN_FREE,) * len(edges),
    )


@dataclass(frozen=True)
class AxisSelector:
    """Selects points with ``x[axis] == value`` up to ``tol``."""

    axis: int
    value: float
    tol: float = 1e-12

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.abs(points[..., self.axis] - self.value) <= self.tol


@dataclass(frozen=True)
class BoundarySpec:
    dirichlet: tuple[AxisSelector, ...] = ()
    traction: tuple[AxisSelector, ...] = ()
    traction_value: tuple[float, float] = (0.0, 0.0)

    @classmethod
    def console(cls, traction_value=(0.0, -1.0)) -> "BoundarySpec":
        """Clamped at x1 = 0, loaded by a surface traction on x2 = 1."""
        return cls(
            dirichlet=(AxisSelector(0, 0.0),),
            traction=(AxisSelector(1, 1.0),),
            traction_value=tuple(traction_value),
        )

    @classmethod
    def clamped(cls) -> "BoundarySpec":
        """Homogeneous Dirichlet condition on the whole boundary."""
        return cls(
            dirichlet=(
                AxisSelector(0, 0.0),
                AxisSelector(0, 1.0),
                AxisSelector(1, 0.0),
                AxisSelector(1, 1.0),
            )
        )


def _edge_matches(selectors: Sequence[AxisSelector], endpoints: np.ndarray) -> np.ndarray:
    hit = np.zeros(endpoints.shape[0], dtype=bool)
    for sel in selectors:
        hit |= np.all(sel(endpoints), axis=1)
    return hit


def tag_boundary(mesh: Mesh, spec: BoundarySpec) -> Mesh:
    """Return a copy of ``mesh`` with its boundary edges tagged per ``spec``.

    An edge is selected when both of its endpoints satisfy the same
    selector. Unselected edges are NEUMANN_FREE. Nodes shared between a
    DIRICHLET and a traction edge end up constrained.
    """
    endpoints = mesh.nodes[mesh.boundary_edges]
    is_d = _edge_matches(spec.dirichlet, endpoints)
    is_t = _edge_matches(spec.traction, endpoints)
    if np.any(is_d & is_t):
        raise ConfigurationError("Dirichlet and traction selectors overlap on a boundary edge")
    if spec.dirichlet and not is_d.any():
        raise ConfigurationError("Dirichlet selectors match no boundary edge")
    if spec.traction and not is_t.any():
        raise ConfigurationError("traction selectors match no boundary edge")
    tags = tuple(
        EdgeTag.DIRICHLET if d else EdgeTag.NEUMANN_TRACTION if t else EdgeTag.NEUMANN_FREE
        for d, t in zip(is_d, is_t)
    )
    return replace(mesh, edge_tags=tags)


def dump_mesh(mesh: Mesh, path: str | Path) -> None:
    """Write ``v x y`` / ``c i j k [l]`` / ``e i j TAG`` lines."""
    lines = [f"v {x!r} {y!r}" for x, y in mesh.nodes.tolist()]
    lines += ["c " + " ".join(str(i) for i in c) for c in mesh.cells.tolist()]
    lines += [
        f"e {i} {j} {tag.value}" for (i, j), tag in zip(mesh.boundary_edges.tolist(), mesh.edge_tags)
    ]
    Path(path).write_text("\n".join(lines) + "\n")
