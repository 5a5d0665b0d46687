import numpy as np
import pytest

from coboson import dynamics, stats


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_spectrum(rng, max_modes=12, min_modes=1):
    j = int(rng.integers(min_modes, max_modes + 1))
    return stats.SchmidtSpectrum(rng.uniform(0.02, 1.0, size=j))


def random_system(rng, ep_margin=1e-3):
    """Random two-site system away from exceptional points."""
    while True:
        sys = dynamics.TwoSiteSystem(
            omega1=float(rng.uniform(-2.0, 2.0)),
            omega2=float(rng.uniform(-2.0, 2.0)),
            v=float(rng.uniform(0.0, 2.0)),
            gamma1=float(rng.uniform(0.0, 2.0)),
            gamma2=float(rng.uniform(0.0, 2.0)))
        if sys.abs_omega > ep_margin:
            return sys


def random_network(rng, max_sites=8):
    m = int(rng.integers(2, max_sites + 1))
    couplings = rng.uniform(-0.6, 0.6, size=(m, m))
    couplings = 0.5 * (couplings + couplings.T)
    np.fill_diagonal(couplings, 0.0)
    return dynamics.SiteNetwork(
        energies=rng.uniform(-1.0, 1.0, size=m),
        decays=rng.uniform(0.0, 1.0, size=m),
        couplings=couplings)


def site_basis(m, k=0):
    psi = np.zeros(m, dtype=np.complex128)
    psi[k] = 1.0
    return psi
