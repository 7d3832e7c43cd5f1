import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from drillfem import kernels
from drillfem.fe_core import ElementKind
from drillfem.forms import Material
from drillfem.mesh import BoundarySpec, build_structured_quad_mesh, tag_boundary
from drillfem.system import Method, MethodConfig, assemble

needs_compiled = pytest.mark.skipif("cython" not in kernels.available_backends(), reason="extension not built")

finite = st.floats(-5, 5, allow_nan=False)


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 5),
    st.sampled_from([3, 4]),
    st.integers(0, 4),
    st.floats(0, 10),
    st.floats(0.01, 10),
    st.data(),
)
def test_compiled_matches_python(m, nb, nqb, lam, mu, data):
    nq = 4
    grads = data.draw(arrays(float, (m, nq, nb, 2), elements=finite))
    qvals = data.draw(arrays(float, (nq, nqb), elements=finite))
    weights = data.draw(arrays(float, (m, nq), elements=st.floats(0, 2)))
    py = kernels.element_blocks(grads, qvals, weights, lam, mu, backend="python")
    cy = kernels.element_blocks(grads, qvals, weights, lam, mu, backend="cython")
    for a, b in zip(py, cy):
        assert a.shape == b.shape
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-10)


@needs_compiled
def test_assembled_systems_agree_across_backends():
    mesh = tag_boundary(build_structured_quad_mesh(6), BoundarySpec.console())
    cfg = MethodConfig(Method.MIXED, ElementKind.Q1, ElementKind.Q1)
    mat = Material(0.5769, 0.3846)
    a = assemble(mesh, cfg, mat, backend="python")
    b = assemble(mesh, cfg, mat, backend="cython")
    for x, y in [(a.A, b.A), (a.B, b.B), (a.C, b.C)]:
        assert abs(x - y).max() < 1e-14


def test_unknown_compiled_backend_error(monkeypatch):
    monkeypatch.setattr(kernels, "_compiled", None)
    with pytest.raises(RuntimeError):
        kernels.element_blocks(np.zeros((1, 1, 3, 2)), np.zeros((1, 0)), np.zeros((1, 1)), 1, 1, backend="cython")
