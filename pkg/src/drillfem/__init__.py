"""Mixed finite elements for 2D linear elasticity with the curl of the
displacement as an independent (drilling) unknown."""

from .errors import ConfigurationError, DegenerateCellError, SolverError
from .fe_core import ElementKind, Purpose, ReferenceElement, eval_shape, map_to_cell, quadrature_for
from .forms import LoadSpec, Material, from_plane_strain, strain_identity_residual
from .kernels import BACKEND
from .mesh import (
    AxisSelector,
    BoundarySpec,
    CellKind,
    EdgeTag,
    Mesh,
    build_structured_quad_mesh,
    build_structured_tri_mesh,
    tag_boundary,
)
from .system import (
    BlockSystem,
    FieldSolution,
    Method,
    MethodConfig,
    apply_dirichlet,
    assemble,
    condense_p,
    solve,
    solve_problem,
    stability_probe,
)

__version__ = "0.1.0"
