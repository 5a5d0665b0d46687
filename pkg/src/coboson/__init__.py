"""Composite-boson statistics and non-Hermitian transfer dynamics.

Subpackages:
  stats     Schmidt-spectrum measures (chi factors, purity, dot correlators)
  dynamics  two-site and network propagation, regimes, exceptional points
  branching decay branching fractions by three independent routes
  scenario  scenario documents, figure presets, deterministic writers
  kernels   compiled/NumPy backend selection for the hot loops
"""

from . import branching, dynamics, kernels, scenario, stats
from ._version import __version__
from .branching import BranchingResult
from .dynamics import SiteNetwork, Trajectory, TwoSiteSystem
from .errors import (AccuracyError, ChannelClosedError, CobosonError,
                     DomainError, ExceptionalPointError, ScenarioParseError,
                     ScenarioValidationError)
from .scenario import Scenario, load_scenario, preset, run_scenario
from .stats import CobosonEnsemble, QuantumDotGeometry, SchmidtSpectrum

__all__ = [
    "__version__",
    "stats", "dynamics", "branching", "scenario", "kernels",
    "SchmidtSpectrum", "CobosonEnsemble", "QuantumDotGeometry",
    "TwoSiteSystem", "SiteNetwork", "Trajectory", "BranchingResult",
    "Scenario", "load_scenario", "preset", "run_scenario",
    "CobosonError", "DomainError", "ChannelClosedError",
    "ExceptionalPointError", "AccuracyError", "ScenarioParseError",
    "ScenarioValidationError",
]
