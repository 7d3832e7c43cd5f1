import numpy as np
import pytest

from drillfem.errors import ConfigurationError
from drillfem.mesh import (
    AxisSelector,
    BoundarySpec,
    CellKind,
    EdgeTag,
    build_structured_quad_mesh,
    build_structured_tri_mesh,
    dump_mesh,
    tag_boundary,
)


@pytest.mark.parametrize("n, nodes, cells, edges", [(1, 4, 1, 4), (2, 9, 4, 8)])
def test_quad_counts(n, nodes, cells, edges):
    mesh = build_structured_quad_mesh(n)
    assert (mesh.n_nodes, mesh.n_cells, len(mesh.boundary_edges)) == (nodes, cells, edges)
    assert mesh.cell_kind is CellKind.QUAD


def test_quad_n4_area():
    mesh = build_structured_quad_mesh(4)
    assert (mesh.n_nodes, mesh.n_cells) == (25, 16)
    assert abs(mesh.cell_areas().sum() - 1.0) < 1e-12


@pytest.mark.parametrize("n, nodes, cells", [(1, 4, 2), (2, 9, 8)])
def test_tri_counts(n, nodes, cells):
    mesh = build_structured_tri_mesh(n)
    assert (mesh.n_nodes, mesh.n_cells) == (nodes, cells)


@pytest.mark.parametrize("n", [1, 3, 7, 20])
def test_tri_areas_congruent(n):
    areas = build_structured_tri_mesh(n).cell_areas()
    np.testing.assert_allclose(areas, 1 / (2 * n * n), atol=1e-14, rtol=0)


def test_tri_diagonal_runs_lower_left_to_upper_right():
    mesh = build_structured_tri_mesh(1)
    np.testing.assert_array_equal(mesh.cells, [[0, 1, 3], [0, 3, 2]])


@pytest.mark.parametrize("build", [build_structured_quad_mesh, build_structured_tri_mesh])
def test_zero_size_rejected(build):
    with pytest.raises(ConfigurationError):
        build(0)


@pytest.mark.parametrize("build, per_square", [(build_structured_quad_mesh, 1), (build_structured_tri_mesh, 2)])
def test_counts_and_invariants_for_all_sizes(build, per_square):
    for n in range(1, 65):
        mesh = build(n)
        assert mesh.n_nodes == (n + 1) ** 2
        assert mesh.n_cells == per_square * n * n
        assert len(mesh.boundary_edges) == 4 * n
        areas = mesh.cell_areas()
        assert np.all(areas > 0)
        assert abs(areas.sum() - 1.0) < 1e-12
        lengths = np.linalg.norm(np.diff(mesh.nodes[mesh.boundary_edges], axis=1)[:, 0], axis=1)
        assert abs(lengths.sum() - 4.0) < 1e-12


@pytest.mark.parametrize("build", [build_structured_quad_mesh, build_structured_tri_mesh])
def test_boundary_edges_belong_to_their_cell(build):
    mesh = build(5)
    for (i, j), c in zip(mesh.boundary_edges, mesh.edge_cells):
        cell = list(mesh.cells[c])
        # the edge appears in the cell's counterclockwise cycle with the same orientation
        k = cell.index(i)
        assert cell[(k + 1) % len(cell)] == j
    # each boundary edge is owned by exactly one cell: no edge appears twice
    keys = {tuple(sorted(e)) for e in mesh.boundary_edges.tolist()}
    assert len(keys) == len(mesh.boundary_edges)


def _tag_counts(mesh):
    return {t: sum(1 for x in mesh.edge_tags if x is t) for t in EdgeTag}


def test_console_tags():
    mesh = tag_boundary(build_structured_quad_mesh(2), BoundarySpec.console())
    counts = _tag_counts(mesh)
    assert counts[EdgeTag.DIRICHLET] == 2
    assert counts[EdgeTag.NEUMANN_TRACTION] == 2
    assert counts[EdgeTag.NEUMANN_FREE] == 4
    # corner (0, 1) is shared with the traction edge and stays constrained
    np.testing.assert_array_equal(mesh.dirichlet_nodes(), [0, 3, 6])


def test_clamped_tags():
    mesh = tag_boundary(build_structured_quad_mesh(2), BoundarySpec.clamped())
    assert _tag_counts(mesh)[EdgeTag.DIRICHLET] == 8


def test_empty_spec_is_all_free():
    mesh = tag_boundary(build_structured_tri_mesh(3), BoundarySpec())
    assert all(t is EdgeTag.NEUMANN_FREE for t in mesh.edge_tags)
    assert mesh.dirichlet_nodes().size == 0


def test_retagging_is_idempotent():
    spec = BoundarySpec.console()
    once = tag_boundary(build_structured_tri_mesh(4), spec)
    twice = tag_boundary(once, spec)
    assert once.edge_tags == twice.edge_tags


def test_unmatched_dirichlet_selector_is_configuration_error():
    spec = BoundarySpec(dirichlet=(AxisSelector(0, 2.0),))
    with pytest.raises(ConfigurationError):
        tag_boundary(build_structured_quad_mesh(2), spec)


def test_overlapping_selectors_rejected():
    spec = BoundarySpec(dirichlet=(AxisSelector(0, 0.0),), traction=(AxisSelector(0, 0.0),))
    with pytest.raises(ConfigurationError):
        tag_boundary(build_structured_quad_mesh(2), spec)


def test_dump_format(tmp_path):
    mesh = tag_boundary(build_structured_quad_mesh(1), BoundarySpec.console())
    path = tmp_path / "mesh.txt"
    dump_mesh(mesh, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "v 0.0 0.0"
    assert "c 0 1 3 2" in lines
    assert "e 2 0 DIRICHLET" in lines
    assert "e 3 2 NEUMANN_TRACTION" in lines
    assert sum(l.startswith("e ") for l in lines) == 4
