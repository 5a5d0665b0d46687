"""Schmidt-spectrum statistics of composite bosons.

A pair of bound fermions behaves as an approximate boson whose quality is
set by the distribution of Schmidt coefficients lambda_j of the pair
wavefunction.  Everything in this module derives from that distribution:
the purity and Schmidt number, the N-pair normalization factor

    chi_n = n! * e_n(lambda_1, ..., lambda_J),

with e_n the n-th elementary symmetric polynomial (Pauli exclusion forbids
double occupancy of a Schmidt mode), the normalization ratios
chi_{n+1}/chi_n that measure the degree of ideal bosonization, and the
norm of the fermionic fragment state left behind when one pair is removed
from an n-pair condensate.  A second family of measures targets quantum-dot
excitons, where the zero-delay pair correlator g2(0) is experimentally
accessible and shrinks below the ideal-boson value as the dot gets small.

chi tables are held in logarithmic scale: the ratios of interest are then
overflow- and underflow-free at any order, and the prefix recurrence for
e_n involves only non-negative terms, so there is no cancellation.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .kernels import esp_log_table

__all__ = [
    "SchmidtSpectrum",
    "CobosonEnsemble",
    "QuantumDotGeometry",
    "purity",
    "schmidt_number",
    "chi",
    "chi_ratio",
    "ideality_alpha",
    "pair_number_mean",
    "commutator_mean",
    "fragment_norm",
    "purity_bounds",
    "brute_force_chi",
    "qdot_g2_zero",
    "bosonic_deviation",
    "binding_deviation",
    "ionization_degree",
]

_ENUMERATION_MODE_LIMIT = 24


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Normalized, canonically ordered Schmidt coefficients.

    Construction normalizes the raw weights to unit sum (experimental
    inputs are rarely normalized) and sorts them in non-increasing order;
    no derived quantity depends on the input order.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coefficients, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("spectrum requires a non-empty 1-d weight list")
        if not np.all(np.isfinite(arr)):
            raise DomainError("weights must be finite")
        if np.any(arr < 0.0):
            raise DomainError("weights must be non-negative (lambda_j >= 0)")
        total = math.fsum(arr.tolist())
        if total <= 0.0:
            raise DomainError("at least one weight must be positive")
        arr = arr / total
        arr = np.sort(arr)[::-1].copy()
        arr.flags.writeable = False
        object.__setattr__(self, "coefficients", arr)

    @classmethod
    def from_weights(cls, weights):
        return cls(np.asarray(list(weights), dtype=np.float64))

    @classmethod
    def uniform(cls, mode_count):
        if mode_count < 1:
            raise DomainError("mode count must be a positive integer")
        return cls(np.full(mode_count, 1.0 / mode_count))

    @classmethod
    def from_file(cls, path):
        """Load one non-negative weight per line; '#' starts a comment."""
        weights = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                body = line.split("#", 1)[0].strip()
                if not body:
                    continue
                try:
                    weights.append(float(body))
                except ValueError:
                    raise DomainError(
                        f"{path}:{lineno}: not a number: {body!r}") from None
        if not weights:
            raise DomainError(f"{path}: no weights found")
        return cls.from_weights(weights)

    @property
    def mode_count(self):
        return int(self.coefficients.size)

    def log_chi_table(self, order_max):
        """log(chi_n) for n = 0..order_max; -inf marks exact zeros.

        chi_0 = chi_1 = 1 exactly by the normalization contract, so those
        entries are pinned rather than taken from the recurrence.
        """
        if order_max < 0:
            raise DomainError("chi order must be non-negative (n >= 0)")
        with np.errstate(divide="ignore"):
            log_lam = np.log(self.coefficients)
        log_e = esp_log_table(log_lam, order_max)
        table = np.array([math.lgamma(k + 1.0)
                          for k in range(order_max + 1)]) + log_e
        table[0] = 0.0
        if order_max >= 1:
            table[1] = 0.0
        return table


@dataclass(frozen=True)
class CobosonEnsemble:
    """A Schmidt spectrum together with a pair count N.

    The chi table up to order N+1 is computed once at construction, so an
    ensemble is immutable afterwards and safe to hand to other threads.
    """

    spectrum: SchmidtSpectrum
    pair_count: int
    log_chi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.pair_count < 1:
            raise DomainError("pair count must be a positive integer (N >= 1)")
        # orders beyond the mode count are exact zeros, no need to store them
        order = min(self.pair_count + 1, self.spectrum.mode_count + 1)
        table = self.spectrum.log_chi_table(order)
        table.flags.writeable = False
        object.__setattr__(self, "log_chi", table)

    def _check_order(self, n, top):
        if not 0 <= n <= top:
            raise DomainError(
                f"ensemble covers chi orders 0..{top} (got n = {n})")

    def chi(self, n):
        self._check_order(n, self.pair_count + 1)
        return float(np.exp(_entry(self.log_chi, n)))

    def chi_ratio(self, n):
        self._check_order(n, self.pair_count)
        return _ratio_from_table(self.log_chi, n)

    def ideality_alpha(self, n):
        self._check_order(n, self.pair_count)
        return _alpha_from_table(self.log_chi, n)

    def pair_number_mean(self, n):
        self._check_order(n, self.pair_count)
        return 1.0 + (n - 1) * _vanishing_ratio(self.log_chi, n)

    def commutator_mean(self, n):
        self._check_order(n, self.pair_count)
        return 2.0 * _ratio_from_table(self.log_chi, n) - 1.0

    def fragment_norm(self, n):
        self._check_order(n, self.pair_count)
        return _fragment_from_table(self.log_chi, n)


def _table(spectrum, order_max):
    # chi vanishes identically beyond the mode count, so tables never need
    # to extend past it regardless of the requested order
    return spectrum.log_chi_table(min(order_max, spectrum.mode_count + 1))


def _entry(table, k):
    """Table lookup treating indices past the stored range as exact zeros."""
    return table[k] if k < table.size else -np.inf


def _ratio_from_table(table, n):
    if n < 1:
        raise DomainError("normalization ratio requires n >= 1")
    denom = _entry(table, n)
    if denom == -np.inf:
        raise DomainError(
            f"chi_{n} = 0 (more pairs than Schmidt modes): ratio undefined")
    numer = _entry(table, n + 1)
    if numer == -np.inf:
        return 0.0
    return float(np.exp(numer - denom))


def _vanishing_ratio(table, n):
    """Ratio for the pair-number mean: 0 whenever chi_{n+1} = 0, even in the
    over-occupied regime where chi_n = 0 as well."""
    if n < 1:
        raise DomainError("normalization ratio requires n >= 1")
    if _entry(table, n + 1) == -np.inf:
        return 0.0
    return _ratio_from_table(table, n)


def _alpha_from_table(table, n):
    if n < 1:
        raise DomainError("ideality parameter requires n >= 1")
    prev = _entry(table, n - 1)
    if prev == -np.inf:
        raise DomainError(
            f"chi_{n - 1} = 0 (more pairs than Schmidt modes): alpha undefined")
    cur = _entry(table, n)
    if cur == -np.inf:
        return 0.0
    return float(np.exp(0.5 * (cur - prev)))


def _fragment_from_table(table, n):
    ratio_up = _ratio_from_table(table, n)
    ratio_down = float(np.exp(_entry(table, n) - _entry(table, n - 1)))
    return 1.0 - ratio_up - n * (ratio_down - ratio_up)


def purity(spectrum):
    """P = sum_j lambda_j^2, between 1/J (uniform) and 1 (single mode)."""
    return math.fsum((spectrum.coefficients ** 2).tolist())


def schmidt_number(spectrum):
    """Effective number of occupied Schmidt modes, K = 1/P."""
    return 1.0 / purity(spectrum)


def chi(spectrum, n):
    """Normalization factor chi_n of the n-pair state.

    chi_n = n! * e_n(lambda); equals 1 for n in {0, 1} and is exactly zero
    once n exceeds the number of modes (exclusion leaves no room).
    """
    if n < 0:
        raise DomainError("chi order must be non-negative (n >= 0)")
    return float(np.exp(_entry(_table(spectrum, n), n)))


def chi_ratio(spectrum, n):
    """Normalization ratio chi_{n+1}/chi_n, the bosonization quality at n.

    Evaluated as a difference of log-chi values so that arbitrarily deep
    orders stay well-conditioned.  1 for ideal bosons, 0 in the hard-core
    (single-mode) limit; non-increasing in n.
    """
    if n < 1:
        raise DomainError("normalization ratio requires n >= 1")
    return _ratio_from_table(_table(spectrum, n + 1), n)


def ideality_alpha(spectrum, n):
    """alpha_n = sqrt(chi_n / chi_{n-1}); 1 in the ideal-boson limit."""
    if n < 1:
        raise DomainError("ideality parameter requires n >= 1")
    return _alpha_from_table(_table(spectrum, n), n)


def pair_number_mean(spectrum, n):
    """Mean pair number 1 + (n-1) chi_{n+1}/chi_n of the n-pair state.

    Equals n only in the ideal-boson limit; for non-ideal spectra the
    ratio is below one and the mean interpolates between 1 and n.  With
    chi_{n+1} = 0 the ratio term is zero, so the hard-core limit gives 1.
    """
    if n < 1:
        raise DomainError("pair number mean requires n >= 1")
    return 1.0 + (n - 1) * _vanishing_ratio(_table(spectrum, n + 1), n)


def commutator_mean(spectrum, n):
    """Expectation 2 chi_{n+1}/chi_n - 1 of the pair commutator.

    1 for ideal bosons, -1 in the single-mode hard-core limit.
    """
    if n < 1:
        raise DomainError("commutator mean requires n >= 1")
    return 2.0 * chi_ratio(spectrum, n) - 1.0


def fragment_norm(spectrum, n):
    """Squared norm of the fragment left by removing a pair from n pairs.

    <F_n|F_n> = 1 - chi_{n+1}/chi_n - n (chi_n/chi_{n-1} - chi_{n+1}/chi_n).
    Vanishes identically at n = 1 and for uniform spectra; the raw value is
    returned unclamped so invariants can inspect rounding-level negatives.
    """
    if n < 1:
        raise DomainError("fragment norm requires n >= 1")
    return _fragment_from_table(_table(spectrum, n + 1), n)


def purity_bounds(spectrum, n):
    """(1 - P*n, 1 - P): guaranteed enclosure of chi_{n+1}/chi_n.

    The lower bound is saturated by uniform spectra, the upper by n = 1.
    """
    if n < 1:
        raise DomainError("purity bounds require n >= 1")
    p = purity(spectrum)
    return 1.0 - p * n, 1.0 - p


def brute_force_chi(spectrum, n):
    """chi_n by explicit subset enumeration; the test oracle.

    Sums n! * prod(lambda_j) over all n-element mode subsets.  Feasible
    only for small spectra (J <= 24); kept deliberately independent of the
    recurrence used by :func:`chi`.
    """
    if n < 0:
        raise DomainError("chi order must be non-negative (n >= 0)")
    j = spectrum.mode_count
    if j > _ENUMERATION_MODE_LIMIT:
        raise DomainError(
            f"enumeration oracle limited to J <= {_ENUMERATION_MODE_LIMIT} modes")
    if n > j:
        return 0.0
    lams = spectrum.coefficients.tolist()
    total = math.fsum(
        math.prod(combo) for combo in itertools.combinations(lams, n))
    return float(math.factorial(n)) * total


@dataclass(frozen=True)
class QuantumDotGeometry:
    """Exciton Bohr radius over dot size, r = a_B / L.

    The dot formulas below are expansions in r and are valid only while
    2 (n - 1) r^2 < 1; outside that window the ideality parameter would be
    imaginary, so operations raise instead of clamping.  r = 0 is the
    point-boson limit.
    """

    bohr_ratio: float

    def __post_init__(self):
        if not (self.bohr_ratio >= 0.0 and math.isfinite(self.bohr_ratio)):
            raise DomainError("bohr ratio must satisfy r >= 0")

    def max_pair_count(self):
        """Largest n with 2 (n - 1) r^2 < 1, or None if unbounded (r = 0)."""
        if self.bohr_ratio == 0.0:
            return None
        limit = 1.0 + 0.5 / self.bohr_ratio ** 2
        return max(1, math.ceil(limit) - 1)

    def check_pair_count(self, n):
        if 2.0 * (n - 1) * self.bohr_ratio ** 2 >= 1.0:
            raise DomainError(
                f"pair count n={n} outside the validity window "
                f"2(n-1)r^2 < 1 for r={self.bohr_ratio!r} "
                f"(maximum admissible n is {self.max_pair_count()})")


def qdot_g2_zero(n, geom):
    """Zero-delay pair correlator g2(0) for n exciton pairs in a dot.

    g2(0) = [(n-1)(1 - 2(n-2) r^2)] [n (1 - 2(n-1) r^2)] / n^2, from the
    small-r expansion of the ideality parameter.  Equals (n-1)/n at r = 0
    and decreases as the dot shrinks (anti-bunching).
    """
    if n < 2:
        raise DomainError("g2(0) requires at least two pairs (n >= 2)")
    geom.check_pair_count(n)
    r2 = geom.bohr_ratio ** 2
    alpha_sq_prev = (n - 1) * (1.0 - 2.0 * (n - 2) * r2)
    alpha_sq = n * (1.0 - 2.0 * (n - 1) * r2)
    return alpha_sq_prev * alpha_sq / (n * n)


def bosonic_deviation(n, geom):
    """delta = 1 - g2(0), the deviation from ideal-boson statistics."""
    return 1.0 - qdot_g2_zero(n, geom)


def binding_deviation(e_c, e_b):
    """Degree of unbinding 1 - E_c/E_b of the paired fermions.

    0 for maximally bound pairs (E_c = E_b), 1 for free fermions (E_c = 0).
    """
    if not e_b > 0.0:
        raise DomainError("maximal binding energy must satisfy e_b > 0")
    if not 0.0 <= e_c <= e_b:
        raise DomainError("pair binding energy must satisfy 0 <= e_c <= e_b")
    return 1.0 - e_c / e_b


def ionization_degree(n_b, n_f):
    """Ionization degree 1 - n_b/n_f of the electron-hole plasma."""
    if not n_f > 0.0:
        raise DomainError("free-carrier density must satisfy n_f > 0")
    if not 0.0 <= n_b <= n_f:
        raise DomainError("bound density must satisfy 0 <= n_b <= n_f")
    return 1.0 - n_b / n_f
