"""Composite Newton-Cotes quadrature on uniform grids.

Kept in-tree (rather than pulling in scipy) so the oracle integration
paths are explicit and deterministic.
"""

import numpy as np

from .errors import AccuracyError


def _simpson_even(y, dx):
    # interval count is even; classic 1-4-2-...-4-1 weights
    return (dx / 3.0) * (y[0] + y[-1]
                         + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-1:2]))


def composite_simpson(y, dx):
    """Integrate uniformly sampled values; odd interval counts fall back to
    a 3/8 closing rule so the order stays O(dx^4)."""
    y = np.asarray(y, dtype=np.float64)
    n = y.size - 1
    if n < 1:
        return 0.0
    if n == 1:
        return 0.5 * dx * (y[0] + y[1])
    if n % 2 == 0:
        return _simpson_even(y, dx)
    if n == 3:
        return (3.0 * dx / 8.0) * (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3])
    head = _simpson_even(y[:n - 2], dx)
    tail = (3.0 * dx / 8.0) * (y[-4] + 3.0 * y[-3] + 3.0 * y[-2] + y[-1])
    return head + tail


def refining_simpson(f, a, b, n_start, tol, max_doublings=12):
    """Composite Simpson with interval doubling until the Richardson
    difference of successive passes drops below tol.

    Returns (value, error_estimate, intervals_used).  ``f`` must accept an
    array of abscissae.
    """
    n = max(4, int(n_start))
    n += n % 2
    x = np.linspace(a, b, n + 1)
    prev = _simpson_even(f(x), (b - a) / n)
    for _ in range(max_doublings):
        n *= 2
        x = np.linspace(a, b, n + 1)
        cur = _simpson_even(f(x), (b - a) / n)
        est = abs(cur - prev) / 15.0
        if est <= tol:
            return cur, est, n
        prev = cur
    raise AccuracyError(
        f"quadrature did not reach tolerance {tol:.1e} within "
        f"{max_doublings} refinements (last estimate {est:.3e})")
