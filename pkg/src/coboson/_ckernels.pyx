# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Cython implementations of the hot kernels.

Mirrors ``_pykernels.py``; see that module for the routine contracts.
"""

from libc.math cimport exp, log1p

import numpy as np

BACKEND_NAME = "compiled"

cdef double NEG_INF = -float("inf")


cdef inline double _logaddexp(double a, double b) noexcept nogil:
    cdef double t
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        t = a
        a = b
        b = t
    return a + log1p(exp(b - a))


def esp_log_table(log_weights, Py_ssize_t order_max):
    cdef double[::1] lw = np.ascontiguousarray(log_weights, dtype=np.float64)
    out = np.full(order_max + 1, NEG_INF)
    cdef double[::1] e = out
    cdef Py_ssize_t j, k, kmax
    cdef double w
    e[0] = 0.0
    if order_max == 0:
        return out
    with nogil:
        for j in range(lw.shape[0]):
            w = lw[j]
            kmax = j + 1
            if kmax > order_max:
                kmax = order_max
            # descending k so e_{k-1} is still the previous-mode value
            for k in range(kmax, 0, -1):
                e[k] = _logaddexp(e[k], w + e[k - 1])
    return out


def rk4_evolve(hamiltonian, psi0, double dt, Py_ssize_t n_steps,
               Py_ssize_t record_every):
    cdef double complex[:, ::1] h = np.ascontiguousarray(
        hamiltonian, dtype=np.complex128)
    cdef double complex[::1] psi = np.array(psi0, dtype=np.complex128)
    cdef Py_ssize_t m = psi.shape[0]
    if n_steps % record_every:
        raise ValueError("n_steps must be a multiple of record_every")
    out = np.empty((n_steps // record_every + 1, m), dtype=np.complex128)
    cdef double complex[:, ::1] rec = out
    work = np.zeros((5, m), dtype=np.complex128)
    cdef double complex[:, ::1] wk = work
    cdef Py_ssize_t step, i, j, r
    cdef double complex acc
    cdef double sixth = dt / 6.0, half = 0.5 * dt
    cdef double complex minus_i = -1j

    for i in range(m):
        rec[0, i] = psi[i]
    r = 1
    with nogil:
        for step in range(1, n_steps + 1):
            # k1 = -i H psi
            for i in range(m):
                acc = 0
                for j in range(m):
                    acc = acc + h[i, j] * psi[j]
                wk[0, i] = minus_i * acc
            # k2 = -i H (psi + dt/2 k1)
            for i in range(m):
                wk[4, i] = psi[i] + half * wk[0, i]
            for i in range(m):
                acc = 0
                for j in range(m):
                    acc = acc + h[i, j] * wk[4, j]
                wk[1, i] = minus_i * acc
            # k3 = -i H (psi + dt/2 k2)
            for i in range(m):
                wk[4, i] = psi[i] + half * wk[1, i]
            for i in range(m):
                acc = 0
                for j in range(m):
                    acc = acc + h[i, j] * wk[4, j]
                wk[2, i] = minus_i * acc
            # k4 = -i H (psi + dt k3)
            for i in range(m):
                wk[4, i] = psi[i] + dt * wk[2, i]
            for i in range(m):
                acc = 0
                for j in range(m):
                    acc = acc + h[i, j] * wk[4, j]
                wk[3, i] = minus_i * acc
            for i in range(m):
                psi[i] = psi[i] + sixth * (
                    wk[0, i] + 2.0 * wk[1, i] + 2.0 * wk[2, i] + wk[3, i])
            if step % record_every == 0:
                for i in range(m):
                    rec[r, i] = psi[i]
                r += 1
    return out
