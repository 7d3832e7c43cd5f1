# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled element kernels; same contract as ``_kernels_py.element_blocks``."""

import numpy as np


def element_blocks(const double[:, :, :, ::1] grads, const double[:, ::1] qvals,
                   const double[:, ::1] weights, double lam, double mu):
    cdef Py_ssize_t m = grads.shape[0], nq = grads.shape[1], nb = grads.shape[2]
    cdef Py_ssize_t nqb = qvals.shape[1], nd = 2 * nb
    cdef Py_ssize_t c, q, a, b, i, j
    cdef double w, gax, gay, gbx, gby, qa

    k_full_arr = np.zeros((m, nd, nd))
    k_a_arr = np.zeros((m, nd, nd))
    k_cc_arr = np.zeros((m, nd, nd))
    b_arr = np.zeros((m, nqb, nd))
    mass_arr = np.zeros((m, nqb, nqb))
    cdef double[:, :, ::1] kf = k_full_arr
    cdef double[:, :, ::1] ka = k_a_arr
    cdef double[:, :, ::1] kc = k_cc_arr
    cdef double[:, :, ::1] bb = b_arr
    cdef double[:, :, ::1] mm = mass_arr
    cdef double two_mu = 2.0 * mu

    with nogil:
        for c in range(m):
            for q in range(nq):
                w = weights[c, q]
                for a in range(nb):
                    gax = grads[c, q, a, 0]
                    gay = grads[c, q, a, 1]
                    i = 2 * a
                    for b in range(nb):
                        gbx = grads[c, q, b, 0]
                        gby = grads[c, q, b, 1]
                        j = 2 * b
                        # (u1 of a, u1 of b)
                        kf[c, i, j] += w * (two_mu * (gax * gbx + 0.5 * gay * gby) + lam * gax * gbx)
                        ka[c, i, j] += w * (two_mu * gax * gbx + lam * gax * gbx)
                        kc[c, i, j] += w * gay * gby
                        # (u1 of a, u2 of b)
                        kf[c, i, j + 1] += w * (mu * gay * gbx + lam * gax * gby)
                        ka[c, i, j + 1] += w * (two_mu * gay * gbx + lam * gax * gby)
                        kc[c, i, j + 1] -= w * gay * gbx
                        # (u2 of a, u1 of b)
                        kf[c, i + 1, j] += w * (mu * gax * gby + lam * gay * gbx)
                        ka[c, i + 1, j] += w * (two_mu * gax * gby + lam * gay * gbx)
                        kc[c, i + 1, j] -= w * gax * gby
                        # (u2 of a, u2 of b)
                        kf[c, i + 1, j + 1] += w * (two_mu * (gay * gby + 0.5 * gax * gbx) + lam * gay * gby)
                        ka[c, i + 1, j + 1] += w * (two_mu * gay * gby + lam * gay * gby)
                        kc[c, i + 1, j + 1] += w * gax * gbx
                for a in range(nqb):
                    qa = w * qvals[q, a]
                    for b in range(nb):
                        bb[c, a, 2 * b] -= qa * grads[c, q, b, 1]
                        bb[c, a, 2 * b + 1] += qa * grads[c, q, b, 0]
                    for b in range(nqb):
                        mm[c, a, b] += qa * qvals[q, b]
    return k_full_arr, k_a_arr, k_cc_arr, b_arr, mass_arr
