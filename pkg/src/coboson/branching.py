"""Decay branching fractions of the two-site system and of networks.

F_k is the probability that an excitation initially on site 1 ultimately
leaves through decay channel k.  Three independent routes are provided for
the two-site F_2 and cross-checked in the tests:

  * the closed form (1 + gamma2/gamma1) V^2 /
    (omega0^2 + gamma_mean^2 (1 + 4 V^2/(gamma1 gamma2))),
  * the time-domain integral gamma_2 * integral of P12(t),
  * the spectral integral gamma_2/(2 pi) * integral of |G12(E)|^2, with
    G the resolvent of the effective generator (the two sides of the
    Parseval identity).

The closed form requires both channels open; the quadrature routes also
cover gamma1 = 0, where everything eventually drains through channel 2.
Per-site fractions of a network follow from the continuity identity
d|psi|^2/dt = -sum_i gamma_i |psi_i|^2, which also fixes the sum rule
sum_i F_i + survival = 1 used as the accuracy check.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._quad import composite_simpson, refining_simpson
from .dynamics import SiteNetwork, _two_site_amplitudes, propagate
from .errors import AccuracyError, ChannelClosedError, DomainError

__all__ = [
    "BranchingResult",
    "f2_closed",
    "f2_time_domain",
    "f1_time_domain",
    "f2_spectral",
    "spectral_truncation",
    "network_branching",
]

_SUM_RULE_TOL = 1e-6


@dataclass(frozen=True)
class BranchingResult:
    """Per-channel decay fractions plus the surviving norm at the horizon."""

    fractions: np.ndarray
    survival: float
    error_estimate: float = 0.0

    def __post_init__(self):
        fr = np.asarray(self.fractions, dtype=np.float64)
        fr.flags.writeable = False
        object.__setattr__(self, "fractions", fr)
        defect = abs(math.fsum(fr.tolist()) + self.survival - 1.0)
        if defect > _SUM_RULE_TOL:
            raise AccuracyError(
                f"branching sum rule violated by {defect:.3e} "
                "(decrease dt or check the horizon)")


def f2_closed(sys):
    """Closed-form branching fraction through channel 2 (both channels open).

    F_1 is its complement 1 - F_2.
    """
    if sys.gamma1 <= 0.0 or sys.gamma2 <= 0.0:
        raise ChannelClosedError(
            "f2_closed requires gamma1 > 0 and gamma2 > 0; "
            "use f2_time_domain for a closed channel")
    gd = sys.gamma_mean
    num = (1.0 + sys.gamma2 / sys.gamma1) * sys.v * sys.v
    den = sys.omega0 ** 2 + gd * gd * (
        1.0 + 4.0 * sys.v * sys.v / (sys.gamma2 * sys.gamma1))
    return num / den


def _slow_rate(sys):
    """Smallest decay rate of the two population envelopes."""
    return sys.gamma_mean - abs(sys.omega_i)


def _tail_bound(sys, g_channel, horizon, slow):
    # populations are bounded by (1 + kappa t)^2 e^{-slow t}
    kappa = max(sys.v, 0.5 * abs(complex(sys.omega0, -sys.gamma_half_diff)))
    a = 1.0 + kappa * horizon
    return g_channel * math.exp(-slow * horizon) * (
        a * a / slow + 2.0 * kappa * a / slow ** 2 + 2.0 * kappa ** 2 / slow ** 3)


def _pick_horizon(sys, g_channel, slow, tol):
    h = max(1.0, 5.0 / slow)
    while _tail_bound(sys, g_channel, h, slow) > tol and h < 1e9:
        h *= 1.4
    return h


def _channel_population(sys, channel):
    """Population of one site vs time via the matrix propagator.

    Kept independent of the printed P12 closed form (the quantity the
    time-domain route is meant to check) and uniformly valid at
    exceptional points.
    """
    psi0 = np.array([1.0, 0.0], dtype=np.complex128)

    def population(t):
        amps = _two_site_amplitudes(sys, psi0, np.asarray(t, dtype=np.float64))
        return np.abs(amps[:, channel - 1]) ** 2

    return population


def _time_domain(sys, channel, horizon, tol):
    """(fraction, error estimate) for gamma_ch * integral of P_ch."""
    if channel not in (1, 2):
        raise DomainError("channel must be 1 or 2")
    if sys.gamma_mean <= 0.0:
        raise DomainError(
            "time-domain fraction requires gamma_mean > 0 for convergence")
    g_channel = sys.gamma1 if channel == 1 else sys.gamma2
    if g_channel == 0.0:
        return 0.0, 0.0  # closed channel carries nothing
    if channel == 2 and sys.v == 0.0:
        return 0.0, 0.0  # no transfer, site 2 never populated
    slow = _slow_rate(sys)
    if slow <= 0.0:
        # only reachable with v = 0 and one closed channel
        slow = min(g for g in (sys.gamma1, sys.gamma2) if g > 0.0)
    tail_target = 0.25 * tol
    if horizon is None:
        horizon = _pick_horizon(sys, g_channel, slow, tail_target)
    if horizon <= 0.0:
        raise DomainError("horizon must satisfy horizon > 0")
    tail = _tail_bound(sys, g_channel, horizon, slow)
    pop = _channel_population(sys, channel)
    scale = max(2.0 * sys.v, abs(sys.omega0), sys.gamma_mean, slow, 1e-3)
    n_start = int(math.ceil(horizon * scale / 0.3))
    if n_start > 4_000_000:
        raise AccuracyError(
            f"time-domain quadrature needs ~{n_start} points (horizon "
            f"{horizon:.3g}, frequency scale {scale:.3g}); the decay is too "
            "slow for this route at the requested tolerance")
    value, quad_est, _ = refining_simpson(
        lambda t: g_channel * pop(t), 0.0, horizon, n_start, 0.25 * tol)
    return value, quad_est + tail


def f2_time_domain(sys, horizon=None, tol=1e-7, with_estimate=False):
    """Branching fraction via gamma_2 * integral of P12(t) dt.

    Independent oracle for :func:`f2_closed`; also valid at gamma1 = 0.
    The default horizon is picked so the analytic tail bound stays below
    the requested tolerance.  With ``with_estimate`` the achieved error
    estimate (quadrature refinement + tail bound) is returned alongside.
    """
    value, estimate = _time_domain(sys, 2, horizon, tol)
    return (value, estimate) if with_estimate else value


def f1_time_domain(sys, horizon=None, tol=1e-7, with_estimate=False):
    """Channel-1 fraction via gamma_1 * integral of P11(t) dt."""
    value, estimate = _time_domain(sys, 1, horizon, tol)
    return (value, estimate) if with_estimate else value


def spectral_truncation(sys, e_span):
    """Bound on the spectral integral lost outside the window.

    The |G12|^2 ~ V^2/E^4 tail, with the window edge pulled in by the
    resonance offsets so the bound stays above the true loss at finite
    spans (it tightens to the asymptotic estimate as the span grows).
    """
    shift = abs(sys.omega0) + max(sys.gamma1, sys.gamma2) + 2.0 * sys.v
    if e_span <= 2.0 * shift:
        raise DomainError(
            f"spectral span must clear the resonances (e_span > {2.0 * shift})")
    return sys.gamma2 * sys.v * sys.v / (3.0 * math.pi * (e_span - shift) ** 3)


def _default_span(sys):
    return 20.0 * max(abs(sys.omega0), sys.v, sys.gamma_mean)


def f2_spectral(sys, e_span=None, n_points=None):
    """Branching fraction via the energy integral of |G12(E)|^2.

    The resolvent off-diagonal is G12(E) = V / det(E - H_eff); its modulus
    squared is integrated by composite Simpson over a window of half-width
    ``e_span`` centered on the mean site energy.  The window truncation is
    bounded by :func:`spectral_truncation`; tolerances should be compared
    against max(tolerance, truncation).
    """
    if sys.gamma_mean <= 0.0:
        raise DomainError(
            "spectral fraction requires gamma_mean > 0 for convergence")
    if sys.gamma2 == 0.0 or sys.v == 0.0:
        return 0.0
    if e_span is None:
        e_span = _default_span(sys)
    spectral_truncation(sys, e_span)  # validates the window width
    slow = _slow_rate(sys)
    if slow <= 0.0:
        slow = min(g for g in (sys.gamma1, sys.gamma2) if g > 0.0)
    if n_points is None:
        width = 0.5 * slow  # narrowest resonance half-width
        n_points = int(math.ceil(2.0 * e_span / (width / 10.0)))
        n_points = min(max(n_points, 1000), 1 << 22)
    if n_points < 1000:
        raise DomainError("spectral quadrature requires n_points >= 1000")
    n = n_points + n_points % 2
    center = sys.mean_energy
    e = np.linspace(center - e_span, center + e_span, n + 1)
    a = e - sys.omega1 + 0.5j * sys.gamma1
    b = e - sys.omega2 + 0.5j * sys.gamma2
    det = a * b - sys.v * sys.v
    integrand = sys.v * sys.v / np.abs(det) ** 2
    integral = composite_simpson(integrand, 2.0 * e_span / n)
    return sys.gamma2 * integral / (2.0 * math.pi)


def network_branching(net, initial_amplitudes, horizon, dt=None,
                      survival_tol=None):
    """Per-site decay fractions F_i = gamma_i * integral of |psi_i(t)|^2.

    Components that cannot decay are allowed; whatever has not left by the
    horizon is reported as ``survival``.  If ``survival_tol`` is given and
    the surviving norm still exceeds it, an AccuracyError suggests a longer
    horizon based on the observed decay rate.
    """
    if not isinstance(net, SiteNetwork):
        raise DomainError("network branching requires a SiteNetwork")
    if horizon <= 0.0:
        raise DomainError("horizon must satisfy horizon > 0")
    if dt is None:
        dt = min(0.02 / net.energy_scale(), horizon / 64.0)
        dt = max(dt, horizon / 2_000_000.0)
    traj = propagate(net, initial_amplitudes, horizon, dt)
    step = float(traj.time_grid[1] - traj.time_grid[0]) if traj.time_grid.size > 1 else 0.0
    fractions = np.array([
        g * composite_simpson(traj.site_populations[:, i], step)
        for i, g in enumerate(net.decays)])
    survival = traj.survival
    if survival_tol is not None and survival > survival_tol:
        norms = traj.total_norm
        k = norms.size * 3 // 4
        span = float(traj.time_grid[-1] - traj.time_grid[k])
        if norms[k] > 0.0 and survival > 0.0 and span > 0.0 \
                and survival < norms[k]:
            rate = math.log(norms[k] / survival) / span
            extra = math.log(survival / survival_tol) / rate
            hint = f"; try horizon >= {horizon + extra:.6g}"
        else:
            hint = " (norm is not decaying; some sites may be unable to decay)"
        raise AccuracyError(
            f"survival {survival:.3e} above requested {survival_tol:.1e} "
            f"at horizon {horizon:g}{hint}")
    defect = abs(math.fsum(fractions.tolist()) + survival - 1.0)
    return BranchingResult(fractions, survival, max(defect, traj.error_estimate))
