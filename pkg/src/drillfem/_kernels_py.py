"""Pure-Python element kernels (fallback for the compiled ``_kernels``).

DOF ordering inside an element is node-major: ``(u1, u2)`` of basis 0,
then basis 1, and so on.
"""

from __future__ import annotations

import numpy as np


def _dof_vectors(grads: np.ndarray):
    """Per-DOF derivative vectors of shape ``(nq, 2 * nb)``.

    ``d11 = du1/dx1``, ``d22 = du2/dx2``, ``d12 = du1/dx2``,
    ``d21 = du2/dx1`` for the vector field ``N_a e_i`` of each DOF.
    """
    nq, nb, _ = grads.shape
    d11 = np.zeros((nq, 2 * nb))
    d22 = np.zeros((nq, 2 * nb))
    d12 = np.zeros((nq, 2 * nb))
    d21 = np.zeros((nq, 2 * nb))
    d11[:, 0::2] = grads[:, :, 0]
    d12[:, 0::2] = grads[:, :, 1]
    d21[:, 1::2] = grads[:, :, 0]
    d22[:, 1::2] = grads[:, :, 1]
    return d11, d22, d12, d21


def curl_vectors(grads: np.ndarray) -> np.ndarray:
    """Scalar curl ``du2/dx1 - du1/dx2`` of every DOF field, ``(nq, 2nb)``."""
    _, _, d12, d21 = _dof_vectors(grads)
    return d21 - d12


def cell_blocks(grads, qvals, weights, lam, mu):
    """Element matrices of one cell.

    Parameters
    ----------
    grads : (nq, nb, 2) physical gradients of the displacement basis
    qvals : (nq, nqb) values of the scalar curl basis (``nqb`` may be 0)
    weights : (nq,) physical quadrature weights

    Returns
    -------
    k_full, k_a, k_cc : (2nb, 2nb)
    b : (nqb, 2nb), coupling ``int q curl(v)``
    mass : (nqb, nqb), unit-coefficient ``int p q``
    """
    d11, d22, d12, d21 = _dof_vectors(np.asarray(grads, dtype=float))
    w = np.asarray(weights, dtype=float)
    div = d11 + d22
    shear = d12 + d21
    curl = d21 - d12

    def gram(a, b):
        return np.einsum("q,qi,qj->ij", w, a, b)

    normal = gram(d11, d11) + gram(d22, d22)
    vol = gram(div, div)
    k_full = 2.0 * mu * (normal + 0.5 * gram(shear, shear)) + lam * vol
    k_a = 2.0 * mu * (normal + gram(d12, d21) + gram(d21, d12)) + lam * vol
    k_cc = gram(curl, curl)
    qvals = np.asarray(qvals, dtype=float)
    b = np.einsum("q,qb,qi->bi", w, qvals, curl)
    mass = np.einsum("q,qa,qb->ab", w, qvals, qvals)
    return k_full, k_a, k_cc, b, mass


def element_blocks(grads, qvals, weights, lam, mu):
    """Batched :func:`cell_blocks` over ``M`` cells.

    ``grads`` is ``(M, nq, nb, 2)`` and ``weights`` is ``(M, nq)``; outputs
    gain a leading cell axis.
    """
    grads = np.asarray(grads, dtype=float)
    m, _, nb, _ = grads.shape
    nqb = np.shape(qvals)[1]
    k_full = np.empty((m, 2 * nb, 2 * nb))
    k_a = np.empty_like(k_full)
    k_cc = np.empty_like(k_full)
    b = np.empty((m, nqb, 2 * nb))
    mass = np.empty((m, nqb, nqb))
    for c in range(m):
        k_full[c], k_a[c], k_cc[c], b[c], mass[c] = cell_blocks(grads[c], qvals, weights[c], lam, mu)
    return k_full, k_a, k_cc, b, mass
