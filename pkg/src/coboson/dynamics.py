"""Effective non-Hermitian dynamics of coupled composite-boson states.

Two condensate states coupled by a tunneling energy V, each leaking into
its fermionic background at a rate gamma_i, evolve under the 2x2 generator

    H_eff = [[omega1 - i gamma1/2,  V],
             [V,                    omega2 - i gamma2/2]].

The complex splitting Omega = sqrt(4 V^2 + (omega0 - i gamma_bar)^2),
with omega0 the detuning and gamma_bar the decay-rate half-difference,
controls everything: oscillatory (coherent) exchange for 2V > |gamma_bar|,
overdamped (incoherent) transfer for 2V < |gamma_bar|, and an exceptional
point with coalescing eigenvalues and eigenvectors at Omega = 0.  The
transfer probability from site 1 to site 2 has the closed form

    P12(t) = (2 V^2 / |Omega|^2) e^{-gamma_mean t}
             (cosh(Omega_i t) - cos(Omega_r t)),

which the propagator here reproduces; an M-site generalization covers
energy-transfer networks (chromophore aggregates) with per-site decay.

All closed forms are evaluated in exponential groupings whose arguments
are non-positive (the generator is passive, so |Omega_i| <= gamma_mean),
which keeps them overflow-free at arbitrarily long times.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyError, DomainError, ExceptionalPointError
from .kernels import rk4_evolve

__all__ = [
    "TwoSiteSystem",
    "SiteNetwork",
    "Trajectory",
    "SweepResult",
    "RegimeClassification",
    "EPSearchResult",
    "p12_closed",
    "p11_closed",
    "propagate",
    "classify_regime",
    "find_exceptional_point",
    "eigenvalues",
    "ep_scan",
    "ep_limit",
]

# |Omega| below this (in the system's energy units) counts as "at" the
# exceptional point; the closed form loses all precision well above the
# rounding floor because of the 1/|Omega|^2 prefactor.
EP_OMEGA_TOL = 1e-8

# Sinc-type series below this |Omega t / 2| avoids the E- - E+ cancellation.
_SMALL_PHASE = 1e-3

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class TwoSiteSystem:
    """Two coupled states with site energies, tunneling V and decay rates."""

    omega1: float
    omega2: float
    v: float
    gamma1: float
    gamma2: float

    def __post_init__(self):
        for name in ("omega1", "omega2", "v", "gamma1", "gamma2"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.v < 0.0:
            raise DomainError("coupling must satisfy v >= 0")
        if self.gamma1 < 0.0:
            raise DomainError("decay rate must satisfy gamma1 >= 0")
        if self.gamma2 < 0.0:
            raise DomainError("decay rate must satisfy gamma2 >= 0")

    @classmethod
    def from_deviations(cls, omega1, omega2, v, delta1, delta2,
                        scale1=1.0, scale2=1.0):
        """Build with phenomenological rates gamma_i = scale_i * delta_i,

        delta_i being a bosonic-deviation measure (see coboson.stats) and
        scale_i an energy constant.
        """
        if delta1 < 0.0 or delta2 < 0.0:
            raise DomainError("deviation measure must satisfy delta >= 0")
        if scale1 < 0.0 or scale2 < 0.0:
            raise DomainError("rate scale must satisfy scale >= 0")
        return cls(omega1, omega2, v, scale1 * delta1, scale2 * delta2)

    @property
    def omega0(self):
        """Detuning omega2 - omega1."""
        return self.omega2 - self.omega1

    @property
    def gamma_mean(self):
        return 0.5 * (self.gamma1 + self.gamma2)

    @property
    def gamma_half_diff(self):
        return 0.5 * (self.gamma2 - self.gamma1)

    @property
    def mean_energy(self):
        return 0.5 * (self.omega1 + self.omega2)

    @property
    def mu(self):
        """Mean eigenvalue of the generator."""
        return complex(self.mean_energy, -0.5 * self.gamma_mean)

    @property
    def omega_sq(self):
        d = complex(self.omega0, -self.gamma_half_diff)
        return 4.0 * self.v * self.v + d * d

    @property
    def omega(self):
        """Complex splitting, principal branch (Re >= 0; Im >= 0 on the cut)."""
        return cmath.sqrt(self.omega_sq)

    @property
    def omega_r(self):
        return self.omega.real

    @property
    def omega_i(self):
        return self.omega.imag

    @property
    def abs_omega(self):
        return abs(self.omega)

    @property
    def abs_omega_sq(self):
        return abs(self.omega_sq)

    def hamiltonian(self):
        """Effective generator as a dense 2x2 complex array."""
        return np.array(
            [[self.omega1 - 0.5j * self.gamma1, self.v],
             [self.v, self.omega2 - 0.5j * self.gamma2]],
            dtype=np.complex128)

    def to_network(self):
        return SiteNetwork(
            energies=np.array([self.omega1, self.omega2]),
            decays=np.array([self.gamma1, self.gamma2]),
            couplings=np.array([[0.0, self.v], [self.v, 0.0]]))


@dataclass(frozen=True)
class SiteNetwork:
    """M sites with energies, per-site decay rates and symmetric couplings."""

    energies: np.ndarray
    decays: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.energies, dtype=np.float64))
        g = np.atleast_1d(np.asarray(self.decays, dtype=np.float64))
        c = np.asarray(self.couplings, dtype=np.float64)
        m = e.size
        if g.size != m:
            raise DomainError("decays must have one entry per site")
        if c.shape != (m, m):
            raise DomainError("couplings must be an MxM matrix")
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(g))
                and np.all(np.isfinite(c))):
            raise DomainError("network parameters must be finite")
        if np.any(g < 0.0):
            raise DomainError("decay rates must satisfy gamma_i >= 0")
        if np.max(np.abs(c - c.T), initial=0.0) > 1e-12:
            raise DomainError("coupling matrix must be symmetric (within 1e-12)")
        if np.max(np.abs(np.diag(c)), initial=0.0) > 1e-12:
            raise DomainError("coupling matrix must have zero diagonal")
        c = 0.5 * (c + c.T)
        np.fill_diagonal(c, 0.0)
        for arr in (e, g, c):
            arr.flags.writeable = False
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "decays", g)
        object.__setattr__(self, "couplings", c)

    @property
    def site_count(self):
        return int(self.energies.size)

    def hamiltonian(self):
        h = self.couplings.astype(np.complex128)
        np.fill_diagonal(h, self.energies - 0.5j * self.decays)
        return h

    def energy_scale(self):
        """Coarse bound on the generator norm, used for step-size defaults."""
        row = np.abs(self.energies) + 0.5 * self.decays \
            + np.sum(np.abs(self.couplings), axis=1)
        return float(max(np.max(row), 1e-12))


@dataclass(frozen=True)
class Trajectory:
    """Populations and total norm on a uniform time grid."""

    time_grid: np.ndarray
    site_populations: np.ndarray
    total_norm: np.ndarray
    amplitudes: np.ndarray
    error_estimate: float = 0.0

    @property
    def site_count(self):
        return int(self.site_populations.shape[1])

    @property
    def delta_p(self):
        """Population difference P_1 - P_2 (two-site convention)."""
        return self.site_populations[:, 0] - self.site_populations[:, 1]

    @property
    def survival(self):
        return float(self.total_norm[-1])


@dataclass(frozen=True)
class SweepResult:
    """Parameter-gridded scalars with a fixed column layout."""

    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RegimeClassification:
    label: str
    detuned: bool = False

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class EPSearchResult:
    """Critical coupling for eigenvalue coalescence, if one exists."""

    v_critical: float | None
    reason: str  # "found" | "hermitian" | "detuned"

    def __bool__(self):
        return self.v_critical is not None


def _as_time_array(t):
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0.0):
        raise DomainError("time must satisfy t >= 0")
    return arr


def p12_closed(sys, t, ep_tol=EP_OMEGA_TOL):
    """Closed-form transfer probability P12(t) from site 1 to site 2.

    (2 V^2/|Omega|^2) e^{-gamma_mean t} (cosh(Omega_i t) - cos(Omega_r t)),
    evaluated through cosh x - cos y = 2 sinh^2(x/2) + 2 sin^2(y/2): both
    terms are non-negative, so the 1/|Omega|^2 prefactor amplifies no
    cancellation near a coalescence, and the large-argument branch regroups
    the exponentials so long times cannot overflow.  Accepts a scalar or
    array t; raises at an exceptional point, where the expression
    degenerates to 0/0 (use :func:`ep_limit` there).
    """
    arr = _as_time_array(t)
    if sys.abs_omega <= ep_tol:
        raise ExceptionalPointError(
            f"|Omega| = {sys.abs_omega:.3e} <= {ep_tol:.1e}: system is at an "
            "exceptional point; use ep_limit instead")
    gd = sys.gamma_mean
    x = abs(sys.omega_i) * arr
    c = gd * arr
    # sinh^2(x/2) e^{-c}: direct below x = 40, grouped decaying exponentials
    # above (there e^{-x} <= e^{-40} makes u - v cancellation-free)
    x_safe = np.minimum(x, 40.0)
    direct = 2.0 * (np.sinh(0.5 * x_safe) * np.exp(-0.5 * c)) ** 2
    u = np.exp(0.5 * (x - c))
    v = np.exp(-0.5 * (x + c))
    grouped = 0.5 * (u - v) ** 2
    hyper = np.where(x > 40.0, grouped, direct)
    trig = 2.0 * np.sin(0.5 * sys.omega_r * arr) ** 2 * np.exp(-c)
    pref = 2.0 * sys.v * sys.v / sys.abs_omega_sq
    val = np.clip(pref * (hyper + trig), 0.0, 1.0)
    return float(val) if np.isscalar(t) else val


def p11_closed(sys, t):
    """Survival probability P11(t) on the initial site.

    Evaluated through the uniformly valid propagator entries, so it is
    well-behaved at exceptional points too.
    """
    arr = _as_time_array(t)
    c, s = _evolution_entries(sys, arr)
    d = complex(sys.omega0, -sys.gamma_half_diff)
    amp = c + 0.5 * d * s
    val = np.clip(np.abs(amp) ** 2, 0.0, 1.0)
    return float(val) if np.isscalar(t) else val


def _evolution_entries(sys, t):
    """(C, S) with exp(-i H t) = C*I - S*A, A = [[-d/2, V], [V, d/2]].

    C = (E- + E+)/2 and S = (E- - E+)/Omega in terms of the decaying mode
    exponentials E-+ = exp(-i (mu -+ Omega/2) t); S switches to its power
    series where |Omega t/2| is small, which is also the defective
    (coalesced) limit, so no eigenvector inversion is ever needed.
    """
    omega = sys.omega
    mu = sys.mu
    em = np.exp(-1j * (mu - 0.5 * omega) * t)
    ep = np.exp(-1j * (mu + 0.5 * omega) * t)
    c = 0.5 * (em + ep)
    z = 0.5 * omega * t
    phase = np.exp(-1j * mu * t)
    zz = z * z
    series = phase * (1j * t) * (1.0 - zz / 6.0 + zz * zz / 120.0)
    if omega == 0.0:
        s = series
    else:
        s = np.where(np.abs(z) < _SMALL_PHASE, series, (em - ep) / omega)
    return c, s


def _two_site_amplitudes(sys, psi0, tgrid):
    c, s = _evolution_entries(sys, tgrid)
    d = complex(sys.omega0, -sys.gamma_half_diff)
    m11 = c + 0.5 * d * s
    m22 = c - 0.5 * d * s
    m12 = -sys.v * s
    out = np.empty((tgrid.size, 2), dtype=np.complex128)
    out[:, 0] = m11 * psi0[0] + m12 * psi0[1]
    out[:, 1] = m12 * psi0[0] + m22 * psi0[1]
    return out


def _validated_initial(psi0, m):
    psi = np.asarray(psi0, dtype=np.complex128)
    if psi.shape != (m,):
        raise DomainError(f"initial amplitudes must be a length-{m} vector")
    norm = float(np.sum(np.abs(psi) ** 2))
    if abs(norm - 1.0) > _NORM_TOL:
        raise DomainError(
            f"initial amplitudes must be normalized (|psi|^2 = {norm!r})")
    return psi


_MAX_GRID_STEPS = 20_000_000


def _time_grid(t_max, dt):
    if not dt > 0.0:
        raise DomainError("time step must satisfy dt > 0")
    if t_max < 0.0:
        raise DomainError("horizon must satisfy t_max >= 0")
    n_steps = int(round(t_max / dt))
    if n_steps > _MAX_GRID_STEPS:
        raise DomainError(
            f"grid of {n_steps} steps exceeds the {_MAX_GRID_STEPS} limit; "
            "increase dt or shorten t_max")
    return np.arange(n_steps + 1) * dt, n_steps


def propagate(system, initial_amplitudes, t_max, dt, tol_per_time=1e-9):
    """Propagate an initial amplitude vector on a uniform time grid.

    Two-site systems use the exact propagator (error at rounding level).
    Networks use fixed-step classical 4th-order integration validated by a
    step-halving Richardson comparison; the halved-step solution is
    returned and its estimated population error must stay below
    ``tol_per_time`` per unit time, otherwise an AccuracyError suggests a
    smaller dt.  Deterministic: same arguments, same grid, same bytes.
    """
    grid, n_steps = _time_grid(t_max, dt)
    if isinstance(system, TwoSiteSystem):
        psi = _validated_initial(initial_amplitudes, 2)
        amps = _two_site_amplitudes(system, psi, grid)
        pops = np.abs(amps) ** 2
        return Trajectory(grid, pops, pops.sum(axis=1), amps, 0.0)
    if not isinstance(system, SiteNetwork):
        raise DomainError("system must be a TwoSiteSystem or SiteNetwork")
    psi = _validated_initial(initial_amplitudes, system.site_count)
    h = system.hamiltonian()
    coarse = rk4_evolve(h, psi, dt, n_steps, 1)
    fine = rk4_evolve(h, psi, 0.5 * dt, 2 * n_steps, 2)
    pops_fine = np.abs(fine) ** 2
    diff = float(np.max(np.abs(pops_fine - np.abs(coarse) ** 2), initial=0.0))
    estimate = diff / 15.0
    budget = tol_per_time * max(1.0, t_max)
    if estimate > budget:
        suggested = dt * (budget / estimate) ** 0.25 * 0.7
        raise AccuracyError(
            f"step check: estimated population error {estimate:.3e} exceeds "
            f"{budget:.3e}; retry with dt <= {suggested:.3e}")
    return Trajectory(grid, pops_fine, pops_fine.sum(axis=1), fine, estimate)


def classify_regime(sys):
    """Coherent, incoherent or exceptional transfer regime.

    For degenerate sites: coherent iff 2V > |gamma_half_diff|, incoherent
    iff 2V < |gamma_half_diff|, exceptional at equality (relative tolerance
    1e-12).  With detuning the same trichotomy is applied to Re(Omega^2)
    and flagged as an extension via ``detuned=True``.
    """
    if sys.omega0 == 0.0:
        a = 2.0 * sys.v
        b = abs(sys.gamma_half_diff)
        tol = 1e-12 * max(a, b)
        if abs(a - b) <= tol:
            return RegimeClassification("exceptional")
        return RegimeClassification("coherent" if a > b else "incoherent")
    x = sys.omega_sq.real
    tol = 1e-12 * max(4.0 * sys.v * sys.v + sys.omega0 * sys.omega0,
                      sys.gamma_half_diff * sys.gamma_half_diff)
    if abs(x) <= tol:
        return RegimeClassification("exceptional", detuned=True)
    return RegimeClassification("coherent" if x > 0.0 else "incoherent",
                                detuned=True)


def find_exceptional_point(gamma1, gamma2, omega0=0.0):
    """Critical coupling V_c with Omega = 0, when the parameters allow one.

    Omega = 0 needs omega0 * gamma_half_diff = 0 together with
    4 V^2 = gamma_half_diff^2 - omega0^2, so a solution exists only for
    degenerate sites with asymmetric decay: V_c = |gamma_half_diff| / 2.
    """
    if gamma1 < 0.0 or gamma2 < 0.0:
        raise DomainError("decay rates must satisfy gamma >= 0")
    gbar = 0.5 * (gamma2 - gamma1)
    if gbar == 0.0:
        return EPSearchResult(None, "hermitian")
    if omega0 != 0.0:
        return EPSearchResult(None, "detuned")
    return EPSearchResult(abs(gbar) / 2.0, "found")


def eigenvalues(sys):
    """Both generator eigenvalues mu -+ Omega/2, sorted by (real, imag)."""
    lam = (sys.mu - 0.5 * sys.omega, sys.mu + 0.5 * sys.omega)
    return tuple(sorted(lam, key=lambda x: (x.real, x.imag)))


def _coalescence(v, d):
    """|<v+|v->| for the normalized right eigenvectors; 1 when coalesced."""
    if v == 0.0:
        return 0.0  # diagonal generator: eigenvectors are the site basis
    omega = cmath.sqrt(4.0 * v * v + d * d)
    up = 0.5 * (d + omega)
    dn = 0.5 * (d - omega)
    overlap = v * v + up.conjugate() * dn
    norm = math.sqrt((v * v + abs(up) ** 2) * (v * v + abs(dn) ** 2))
    return abs(overlap) / norm


def _validated_grid(values, name):
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} grid must be a non-empty 1-d list")
    if arr.size > 1 and np.any(np.diff(arr) <= 0.0):
        raise DomainError(f"{name} grid must be strictly increasing")
    return arr


def ep_scan(v_grid, gamma_diff_grid, omega0=0.0):
    """Map |Omega|^2, regime and eigenvector coalescence over a grid.

    Rows run over v (outer) then gamma_half_diff (inner).  The coalescence
    column is the modulus of the normalized right-eigenvector overlap:
    0 for a Hermitian (orthogonal) pair, 1 at an exceptional point.
    """
    vs = _validated_grid(v_grid, "v")
    gs = _validated_grid(gamma_diff_grid, "gamma_diff")
    rows = []
    for v in vs:
        if v < 0.0:
            raise DomainError("coupling grid must satisfy v >= 0")
        for g in gs:
            d = complex(omega0, -g)
            omega_sq = 4.0 * v * v + d * d
            gamma1, gamma2 = (0.0, 2.0 * g) if g >= 0.0 else (-2.0 * g, 0.0)
            sys = TwoSiteSystem(0.0, omega0, v, gamma1, gamma2)
            rows.append((float(v), float(g), abs(omega_sq),
                         classify_regime(sys).label, _coalescence(v, d)))
    return SweepResult(
        ("v", "gamma_diff", "abs_omega_sq", "regime", "coalescence"), rows)


def ep_limit(sys, t, ep_tol=EP_OMEGA_TOL):
    """Omega -> 0 limit of the transfer probability, V^2 t^2 e^{-gamma t}.

    Only valid at (numerically at) an exceptional point; elsewhere the
    closed form applies and this raises.
    """
    arr = _as_time_array(t)
    if sys.abs_omega > ep_tol:
        raise DomainError(
            f"|Omega| = {sys.abs_omega:.3e} > {ep_tol:.1e}: system is away "
            "from the exceptional point; use p12_closed instead")
    val = (sys.v * arr) ** 2 * np.exp(-sys.gamma_mean * arr)
    val = np.clip(val, 0.0, 1.0)
    return float(val) if np.isscalar(t) else val
