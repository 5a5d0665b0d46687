"""Schmidt-spectrum statistics against enumeration oracles and identities."""

import math

import numpy as np
import pytest

from coboson import stats
from coboson.errors import DomainError
from conftest import random_spectrum

TRIPLE = stats.SchmidtSpectrum.from_weights([0.5, 0.3, 0.2])
SINGLE = stats.SchmidtSpectrum.from_weights([1.0])

# frozen from the subset-enumeration oracle (brute_force_chi):
#   chi_2 = 2 e_2 = 0.62, chi_3 = 6 e_3 = 0.18
TRIPLE_RATIO_2 = 0.18 / 0.62
TRIPLE_FRAGMENT_2 = 1.0 - TRIPLE_RATIO_2 - 2.0 * (0.62 - TRIPLE_RATIO_2)


class TestSpectrumConstruction:
    def test_normalizes_and_sorts(self):
        s = stats.SchmidtSpectrum.from_weights([2.0, 6.0, 4.0])
        np.testing.assert_allclose(s.coefficients, [0.5, 1 / 3, 1 / 6], rtol=1e-15)
        assert abs(math.fsum(s.coefficients.tolist()) - 1.0) < 1e-12

    def test_rejects_bad_weights(self):
        with pytest.raises(DomainError):
            stats.SchmidtSpectrum.from_weights([0.5, -0.1])
        with pytest.raises(DomainError):
            stats.SchmidtSpectrum.from_weights([])
        with pytest.raises(DomainError):
            stats.SchmidtSpectrum.from_weights([0.0, 0.0])
        with pytest.raises(DomainError):
            stats.SchmidtSpectrum.from_weights([float("nan")])

    def test_uniform(self):
        s = stats.SchmidtSpectrum.uniform(8)
        assert s.mode_count == 8
        np.testing.assert_array_equal(s.coefficients, np.full(8, 0.125))

    def test_from_file(self, tmp_path):
        path = tmp_path / "weights.txt"
        path.write_text("# comment line\n0.5\n0.3  # inline\n\n0.2\n")
        s = stats.SchmidtSpectrum.from_file(path)
        np.testing.assert_allclose(s.coefficients, TRIPLE.coefficients)

    def test_from_file_bad_line(self, tmp_path):
        path = tmp_path / "weights.txt"
        path.write_text("0.5\nnot-a-number\n")
        with pytest.raises(DomainError, match="line 2|:2"):
            stats.SchmidtSpectrum.from_file(path)

    def test_permutation_invariance(self, rng):
        for _ in range(30):
            weights = rng.uniform(0.01, 5.0, size=int(rng.integers(2, 10)))
            a = stats.SchmidtSpectrum(weights)
            b = stats.SchmidtSpectrum(rng.permutation(weights))
            np.testing.assert_array_equal(a.coefficients, b.coefficients)
            for n in range(1, a.mode_count):
                assert stats.chi_ratio(a, n) == stats.chi_ratio(b, n)
                assert stats.fragment_norm(a, n) == stats.fragment_norm(b, n)


class TestPurity:
    def test_values(self):
        assert stats.purity(SINGLE) == 1.0
        assert stats.purity(stats.SchmidtSpectrum.uniform(2)) == 0.5
        assert math.isclose(stats.purity(TRIPLE), 0.38, rel_tol=1e-14)

    def test_schmidt_number(self):
        assert stats.schmidt_number(SINGLE) == 1.0
        assert stats.schmidt_number(stats.SchmidtSpectrum.uniform(2)) == 2.0
        assert math.isclose(stats.schmidt_number(TRIPLE), 1.0 / 0.38,
                            rel_tol=1e-14)

    def test_range(self, rng):
        for _ in range(50):
            s = random_spectrum(rng)
            p = stats.purity(s)
            assert 1.0 / s.mode_count - 1e-12 <= p <= 1.0 + 1e-15
            assert 1.0 - 1e-12 <= stats.schmidt_number(s) <= s.mode_count + 1e-9


class TestChi:
    def test_trivial_orders(self, rng):
        for _ in range(10):
            s = random_spectrum(rng)
            assert stats.chi(s, 0) == 1.0
            assert stats.chi(s, 1) == 1.0

    def test_uniform_j4(self):
        s = stats.SchmidtSpectrum.uniform(4)
        assert math.isclose(stats.chi(s, 2), 0.75, rel_tol=1e-13)

    def test_pauli_exclusion(self):
        assert stats.chi(SINGLE, 2) == 0.0
        assert stats.brute_force_chi(SINGLE, 2) == 0.0

    def test_negative_order(self):
        with pytest.raises(DomainError):
            stats.chi(TRIPLE, -1)
        with pytest.raises(DomainError):
            stats.brute_force_chi(TRIPLE, -1)

    def test_brute_force_feasibility_limit(self):
        wide = stats.SchmidtSpectrum.uniform(25)
        with pytest.raises(DomainError):
            stats.brute_force_chi(wide, 2)

    def test_matches_enumeration(self, rng):
        for _ in range(50):
            s = random_spectrum(rng)
            n = int(rng.integers(0, min(6, s.mode_count) + 1))
            ref = stats.brute_force_chi(s, n)
            assert math.isclose(stats.chi(s, n), ref, rel_tol=1e-12)

    def test_uniform_closed_form(self):
        # chi_n = prod_{k<n} (1 - k/J) for a uniform spectrum
        s = stats.SchmidtSpectrum.uniform(30)
        for n in (2, 5, 11):
            expected = math.prod(1.0 - k / 30.0 for k in range(n))
            assert math.isclose(stats.chi(s, n), expected, rel_tol=1e-12)


class TestChiRatio:
    def test_uniform(self):
        s = stats.SchmidtSpectrum.uniform(10)
        assert math.isclose(stats.chi_ratio(s, 3), 0.7, rel_tol=1e-13)

    def test_hard_core(self):
        assert stats.chi_ratio(SINGLE, 1) == 0.0

    def test_triple(self):
        assert math.isclose(stats.chi_ratio(TRIPLE, 2), TRIPLE_RATIO_2,
                            rel_tol=1e-12)

    def test_zero_denominator(self):
        with pytest.raises(DomainError):
            stats.chi_ratio(SINGLE, 2)

    def test_deep_order_stays_finite(self):
        # far beyond where linear-space chi underflows
        s = stats.SchmidtSpectrum.uniform(4096)
        ratio = stats.chi_ratio(s, 2000)
        assert math.isclose(ratio, 1.0 - 2000.0 / 4096.0, rel_tol=1e-9)

    def test_monotone_in_n(self, rng):
        for _ in range(50):
            s = random_spectrum(rng, min_modes=2)
            ratios = [stats.chi_ratio(s, n) for n in range(1, s.mode_count)]
            for a, b in zip(ratios, ratios[1:]):
                assert b <= a + 1e-12


class TestIdealityAlpha:
    def test_first_order_is_unity(self, rng):
        for _ in range(10):
            assert stats.ideality_alpha(random_spectrum(rng), 1) == 1.0

    def test_uniform_j4(self):
        s = stats.SchmidtSpectrum.uniform(4)
        assert math.isclose(stats.ideality_alpha(s, 2), math.sqrt(0.75),
                            rel_tol=1e-13)

    def test_hard_core(self):
        assert stats.ideality_alpha(SINGLE, 2) == 0.0


class TestPairNumberMean:
    def test_single_pair(self, rng):
        for _ in range(10):
            assert stats.pair_number_mean(random_spectrum(rng), 1) == 1.0

    def test_uniform_j4(self):
        s = stats.SchmidtSpectrum.uniform(4)
        assert math.isclose(stats.pair_number_mean(s, 2), 1.5, rel_tol=1e-13)

    def test_hard_core(self):
        assert stats.pair_number_mean(SINGLE, 2) == 1.0


class TestCommutatorMean:
    def test_hard_core(self):
        assert stats.commutator_mean(SINGLE, 1) == -1.0

    def test_uniform_j4(self):
        assert abs(stats.commutator_mean(stats.SchmidtSpectrum.uniform(4), 2)) \
            < 1e-13

    def test_ideal_limit(self):
        s = stats.SchmidtSpectrum.uniform(4096)
        val = stats.commutator_mean(s, 3)
        assert math.isclose(val, 1.0 - 6.0 / 4096.0, rel_tol=1e-10)

    def test_identity_with_ratio(self, rng):
        for _ in range(20):
            s = random_spectrum(rng, min_modes=2)
            n = int(rng.integers(1, s.mode_count))
            assert stats.commutator_mean(s, n) == \
                2.0 * stats.chi_ratio(s, n) - 1.0


class TestFragmentNorm:
    def test_first_order_vanishes_exactly(self, rng):
        for _ in range(20):
            assert stats.fragment_norm(random_spectrum(rng), 1) == 0.0

    def test_uniform_vanishes(self):
        for j, n in [(4, 2), (10, 7), (64, 3)]:
            s = stats.SchmidtSpectrum.uniform(j)
            assert abs(stats.fragment_norm(s, n)) < 1e-13

    def test_triple(self):
        assert math.isclose(stats.fragment_norm(TRIPLE, 2), TRIPLE_FRAGMENT_2,
                            rel_tol=1e-10)

    def test_limit_large_uniform(self):
        s = stats.SchmidtSpectrum.uniform(4096)
        assert abs(stats.fragment_norm(s, 3)) < 1e-12

    def test_non_negative(self, rng):
        for _ in range(100):
            s = random_spectrum(rng, min_modes=2)
            n = int(rng.integers(1, s.mode_count))
            assert stats.fragment_norm(s, n) >= -1e-12


class TestPurityBounds:
    def test_uniform_saturates_lower(self):
        s = stats.SchmidtSpectrum.uniform(10)
        lower, upper = stats.purity_bounds(s, 3)
        assert math.isclose(lower, 0.7, rel_tol=1e-14)
        assert math.isclose(upper, 0.9, rel_tol=1e-14)
        assert abs(stats.chi_ratio(s, 3) - lower) < 1e-12

    def test_single_mode_collapses(self):
        lower, upper = stats.purity_bounds(SINGLE, 1)
        assert lower == 0.0 and upper == 0.0
        assert stats.chi_ratio(SINGLE, 1) == 0.0

    def test_triple(self):
        lower, upper = stats.purity_bounds(TRIPLE, 2)
        assert math.isclose(lower, 0.24, rel_tol=1e-12)
        assert math.isclose(upper, 0.62, rel_tol=1e-12)
        assert lower <= stats.chi_ratio(TRIPLE, 2) <= upper

    def test_containment_random(self, rng):
        for _ in range(100):
            s = random_spectrum(rng, min_modes=2)
            for n in range(1, s.mode_count):
                lower, upper = stats.purity_bounds(s, n)
                ratio = stats.chi_ratio(s, n)
                assert lower - 1e-12 <= ratio <= upper + 1e-12


class TestLargeOrders:
    # orders far beyond the mode count must stay O(J) in time and memory
    def test_chi_and_mean_short_circuit(self):
        assert stats.chi(TRIPLE, 10 ** 9) == 0.0
        assert stats.pair_number_mean(TRIPLE, 10 ** 9) == 1.0

    def test_ratio_family_raises(self):
        for fn in (stats.chi_ratio, stats.commutator_mean,
                   stats.fragment_norm, stats.ideality_alpha):
            with pytest.raises(DomainError):
                fn(TRIPLE, 10 ** 9)

    def test_alpha_just_past_support(self):
        # chi_3 > 0 but chi_4 = 0 for a three-mode spectrum
        assert stats.ideality_alpha(TRIPLE, 4) == 0.0

    def test_ensemble_with_huge_pair_count(self):
        ens = stats.CobosonEnsemble(TRIPLE, 10 ** 7)
        assert ens.chi(5) == 0.0
        assert ens.pair_number_mean(10 ** 6) == 1.0
        with pytest.raises(DomainError):
            ens.chi_ratio(10 ** 7 + 1)  # outside the cached range


class TestEnsemble:
    def test_chi_endpoints_exact(self, rng):
        for _ in range(10):
            ens = stats.CobosonEnsemble(random_spectrum(rng), 3)
            assert ens.chi(0) == 1.0
            assert ens.chi(1) == 1.0

    def test_matches_module_functions(self, rng):
        s = random_spectrum(rng, min_modes=4)
        ens = stats.CobosonEnsemble(s, 3)
        assert ens.chi_ratio(2) == stats.chi_ratio(s, 2)
        assert ens.fragment_norm(2) == stats.fragment_norm(s, 2)
        assert ens.ideality_alpha(3) == stats.ideality_alpha(s, 3)
        assert ens.commutator_mean(1) == stats.commutator_mean(s, 1)
        assert ens.pair_number_mean(3) == stats.pair_number_mean(s, 3)

    def test_validates_pair_count(self):
        with pytest.raises(DomainError):
            stats.CobosonEnsemble(TRIPLE, 0)


class TestQuantumDot:
    def test_bosonic_limit_exact(self):
        geom = stats.QuantumDotGeometry(0.0)
        for n in (2, 3, 10, 500):
            assert stats.qdot_g2_zero(n, geom) == (n - 1) / n

    def test_spot_values(self):
        geom = stats.QuantumDotGeometry(0.1)
        assert math.isclose(stats.qdot_g2_zero(2, geom), 0.49, rel_tol=1e-14)
        assert math.isclose(stats.bosonic_deviation(2, geom), 0.51,
                            rel_tol=1e-14)
        assert math.isclose(
            stats.bosonic_deviation(2, stats.QuantumDotGeometry(0.01)),
            0.5001, rel_tol=1e-12)

    def test_deviation_increases_with_ratio(self):
        for n in (2, 5, 20):
            rs = np.linspace(0.0, 0.1, 200)
            vals = [stats.bosonic_deviation(n, stats.QuantumDotGeometry(r))
                    for r in rs]
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_requires_two_pairs(self):
        with pytest.raises(DomainError):
            stats.qdot_g2_zero(1, stats.QuantumDotGeometry(0.01))

    def test_validity_window(self):
        geom = stats.QuantumDotGeometry(0.2)
        # 2 (n-1) 0.04 < 1  =>  n <= 13
        assert geom.max_pair_count() == 13
        stats.qdot_g2_zero(13, geom)
        with pytest.raises(DomainError, match="13"):
            stats.qdot_g2_zero(14, geom)

    def test_rejects_negative_ratio(self):
        with pytest.raises(DomainError):
            stats.QuantumDotGeometry(-0.1)


class TestScalarDeviations:
    def test_binding(self):
        assert stats.binding_deviation(10.0, 10.0) == 0.0
        assert stats.binding_deviation(0.0, 10.0) == 1.0
        assert math.isclose(stats.binding_deviation(2.5, 10.0), 0.75,
                            rel_tol=1e-15)
        with pytest.raises(DomainError):
            stats.binding_deviation(1.0, 0.0)
        with pytest.raises(DomainError):
            stats.binding_deviation(11.0, 10.0)

    def test_ionization(self):
        assert stats.ionization_degree(4.0, 4.0) == 0.0
        assert stats.ionization_degree(0.0, 4.0) == 1.0
        assert math.isclose(stats.ionization_degree(3.0, 4.0), 0.25,
                            rel_tol=1e-15)
        with pytest.raises(DomainError):
            stats.ionization_degree(-1.0, 4.0)
        with pytest.raises(DomainError):
            stats.ionization_degree(1.0, 0.0)
