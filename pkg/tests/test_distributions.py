import math
from fractions import Fraction

import pytest

from latinlab.core import ParityTriple, f_of_n
from latinlab.distributions import (
    MixtureSpec,
    NearBinomialSpec,
    Pmf,
    binom_half_pmf,
    binom_pmf,
    empirical_pmf,
    entropy_h2,
    local_clt_density,
    mixture_sample,
    mu_star_mass,
    mu_star_pmf,
    mu_star_total,
    near_binomial_pmf,
    parity_mod2_counts,
    rate_I,
    tv_distance,
    two_near_binomial_pmf,
)
from latinlab.errors import InvariantBreachError, ValidationError
from latinlab.rng import make_rng


class TestReferencePmfs:
    def test_mu_star_n1(self):
        pmf = mu_star_pmf(1)
        assert pmf.as_dict() == {
            (0, 0, 0): Fraction(1, 4),
            (0, 1, 1): Fraction(1, 4),
            (1, 0, 1): Fraction(1, 4),
            (1, 1, 0): Fraction(1, 4),
        }

    def test_binom_pmf(self):
        assert binom_pmf(2, 1) == Fraction(1, 2)
        assert binom_half_pmf(3).total() == 1

    def test_mu_star_normalization_exact(self):
        for n in (2, 5, 8, 17):
            assert mu_star_pmf(n).total() == 1

    def test_mu_star_normalization_large(self):
        for n in (64, 100, 200):
            assert abs(mu_star_total(n) - 1.0) <= 1e-12

    def test_binomial_parity_is_fair(self):
        for n in range(1, 30):
            even = sum(binom_pmf(n, k) for k in range(0, n + 1, 2))
            assert even == Fraction(1, 2)

    def test_mu_star_marginal_is_binomial(self):
        n = 9
        pmf = mu_star_pmf(n)
        marginal = {}
        for (x1, _, _), mass in pmf.masses:
            marginal[x1] = marginal.get(x1, Fraction(0)) + mass
        assert marginal == binom_half_pmf(n).as_dict()

    def test_mu_star_mass_respects_parity(self):
        assert mu_star_mass(4, (1, 1, 1)) == 0
        assert mu_star_mass(4, (0, 0, 0)) == 2 * Fraction(1, 16) ** 3


class TestNearBinomial:
    def test_d0_is_plain_product(self):
        n = 6
        spec = NearBinomialSpec(n, 0, (0, 0, 0), (n, n, n))
        pmf = near_binomial_pmf(spec)
        assert pmf.total() == 1
        assert pmf.mass((3, 3, 3)) == binom_pmf(n, 3) ** 3

    def test_conditioned_point_mass(self):
        spec = NearBinomialSpec(1, 1, (0, 0, 0), (1, 1, 1), (0, 0, 0))
        assert two_near_binomial_pmf(spec).as_dict() == {(0, 0, 0): Fraction(1)}

    def test_mu_star_is_uniform_mixture_of_admissible_components(self):
        n = 8
        target = f_of_n(n)
        mixture = {}
        for b1 in (0, 1):
            for b2 in (0, 1):
                b3 = (target + b1 + b2) % 2
                spec = NearBinomialSpec(n, 0, (0, 0, 0), (n, n, n), (b1, b2, b3))
                for key, mass in two_near_binomial_pmf(spec).masses:
                    mixture[key] = mixture.get(key, Fraction(0)) + mass / 4
        assert mixture == mu_star_pmf(n).as_dict()

    def test_spec_validation(self):
        with pytest.raises(ValidationError):
            NearBinomialSpec(5, 1, (2, 0, 0), (5, 5, 5))
        with pytest.raises(ValidationError):
            NearBinomialSpec(5, 1, (0, 0, 0), (3, 5, 5))

    def test_mixture_sampling_respects_parity(self):
        spec = NearBinomialSpec(6, 0, (0, 0, 0), (6, 6, 6), (0, 1, 1))
        mix = MixtureSpec(((Fraction(1), spec),))
        rng = make_rng(1)
        for _ in range(500):
            x = mixture_sample(mix, rng)
            assert x[0] % 2 == 0 and x[1] % 2 == 1 and x[2] % 2 == 1

    def test_mixture_weight_validation(self):
        spec = NearBinomialSpec(4, 0, (0, 0, 0), (4, 4, 4))
        with pytest.raises(ValidationError):
            MixtureSpec(((0.5, spec),), exceptional_mass=0.2)

    def test_exceptional_mass_needs_pmf(self):
        spec = NearBinomialSpec(4, 0, (0, 0, 0), (4, 4, 4))
        mix = MixtureSpec(((0.0, spec),), exceptional_mass=1.0)
        with pytest.raises(ValidationError):
            mixture_sample(mix, make_rng(0))


class TestTv:
    def test_identical(self):
        pmf = binom_half_pmf(5)
        assert tv_distance(pmf, pmf) == 0.0

    def test_disjoint(self):
        a = Pmf.from_dict({0: Fraction(1)})
        b = Pmf.from_dict({3: Fraction(1)})
        assert tv_distance(a, b) == 1.0

    def test_binomial_vs_point(self):
        assert tv_distance(binom_half_pmf(1), Pmf.from_dict({0: Fraction(1)})) == 0.5

    def test_triangle_inequality(self):
        rng = make_rng(2)
        for _ in range(40):
            pmfs = []
            for _ in range(3):
                support = rng.sample(range(10), 4)
                weights = [rng.random() for _ in support]
                total = sum(weights)
                pmfs.append(Pmf.from_dict({k: w / total for k, w in zip(support, weights)}))
            a, b, c = pmfs
            assert tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12


class TestAnalyticEvaluators:
    def test_rate_center(self):
        assert rate_I(0.5, 0.5, 0.5) == 0.0

    def test_entropy_convention(self):
        assert entropy_h2(0) == 0.0
        assert entropy_h2(1) == 0.0
        assert entropy_h2(0.5) == 1.0

    def test_rate_positive_off_center(self):
        assert rate_I(0.1, 0.5, 0.5) > 0

    def test_local_clt_center_value(self):
        n = 16
        value = local_clt_density((8, 8, 8), n, 2)
        assert math.isclose(value, 2 / (2 * math.pi * n / 4) ** 1.5, rel_tol=1e-12)

    def test_local_clt_matches_exact_at_100(self):
        n = 100
        exact = float(mu_star_mass(n, (50, 50, 50)))
        approx = local_clt_density((50, 50, 50), n, 2)
        assert abs(approx - exact) / exact <= 0.05

    def test_local_clt_factor_validation(self):
        with pytest.raises(ValidationError):
            local_clt_density((1, 1, 1), 4, 3)


class TestParityCells:
    def test_single_sample(self):
        table, chi2 = parity_mod2_counts([ParityTriple(1, 1, 1)], 2)
        assert table[(1, 1, 1)] == 1
        assert chi2 == 3.0  # one occupied cell out of four

    def test_uniform_synthetic(self):
        samples = [
            ParityTriple(0, 0, 0),
            ParityTriple(0, 1, 1),
            ParityTriple(1, 0, 1),
            ParityTriple(1, 1, 0),
        ] * 25
        table, chi2 = parity_mod2_counts(samples, 4)
        assert chi2 == 0.0
        assert sum(1 for v in table.values() if v) == 4

    def test_breach_detected(self):
        with pytest.raises(InvariantBreachError):
            parity_mod2_counts([ParityTriple(0, 0, 0)], 2)

    def test_enumerated_n4_cells(self, n4_squares):
        # exhaustive fact: at order 4 every square has all-even parities, so
        # only the (0,0,0) cell is populated; no inadmissible cell is hit
        from latinlab.core import parity_counts

        samples = [parity_counts(sq) for sq in n4_squares]
        table, chi2 = parity_mod2_counts(samples, 4)
        occupied = {cell for cell, count in table.items() if count}
        assert occupied == {(0, 0, 0)}
        assert table[(0, 0, 0)] == 576

    def test_enumerated_n5_cells(self, n5_scan):
        # at order 5 exactly the four admissible cells are populated, equally
        assert n5_scan["cells"] == {
            (0, 0, 0): 40320,
            (0, 1, 1): 40320,
            (1, 0, 1): 40320,
            (1, 1, 0): 40320,
        }


def test_empirical_pmf():
    pmf = empirical_pmf([1, 1, 2, 3])
    assert pmf.as_dict() == {1: Fraction(1, 2), 2: Fraction(1, 4), 3: Fraction(1, 4)}


def test_pmf_json_roundtrip():
    pmf = mu_star_pmf(2, exact=False)
    again = Pmf.from_json(pmf.to_json())
    assert set(again.as_dict()) == set(pmf.as_dict())
    assert abs(again.total() - 1) < 1e-12
