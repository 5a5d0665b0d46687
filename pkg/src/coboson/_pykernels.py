"""NumPy implementations of the hot kernels.

These are the reference versions of the routines in ``_ckernels.pyx``; the
active backend is chosen in :mod:`coboson.kernels`.  Both implementations
must agree to close to machine precision (see tests/test_kernels.py).
"""

import numpy as np

BACKEND_NAME = "python"


def esp_log_table(log_weights, order_max):
    """Log-space table of elementary symmetric polynomials e_0..e_order_max.

    Uses the prefix recurrence e_k <- e_k + w_j * e_{k-1}, which has no
    cancellation (all terms non-negative), carried out with logaddexp so
    that deep orders neither overflow nor underflow.  Entries that are
    exactly zero (order above the number of modes) come out as -inf.
    """
    log_weights = np.asarray(log_weights, dtype=np.float64)
    table = np.full(order_max + 1, -np.inf)
    table[0] = 0.0
    if order_max == 0:
        return table
    for lw in log_weights:
        # RHS is evaluated before assignment, so e_{k-1} is the old value.
        table[1:] = np.logaddexp(table[1:], lw + table[:-1])
    return table


def rk4_evolve(hamiltonian, psi0, dt, n_steps, record_every):
    """Fixed-step classical Runge-Kutta integration of i dpsi/dt = H psi.

    Records the amplitude vector at step 0 and after every
    ``record_every``-th step; ``n_steps`` must be a multiple of
    ``record_every``.  Returns an (n_records, M) complex array.
    """
    h = np.asarray(hamiltonian, dtype=np.complex128)
    psi = np.array(psi0, dtype=np.complex128)
    if n_steps % record_every:
        raise ValueError("n_steps must be a multiple of record_every")
    gen = -1j * h
    n_rec = n_steps // record_every + 1
    out = np.empty((n_rec, psi.size), dtype=np.complex128)
    out[0] = psi
    rec = 1
    for step in range(1, n_steps + 1):
        k1 = gen @ psi
        k2 = gen @ (psi + 0.5 * dt * k1)
        k3 = gen @ (psi + 0.5 * dt * k2)
        k4 = gen @ (psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % record_every == 0:
            out[rec] = psi
            rec += 1
    return out
