import json
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

import oracles
from primelab.errors import (
    CapacityError,
    ConsistencyError,
    ValidationError,
)
from primelab.maynard import (
    BasisIndex,
    GBoundParams,
    QuadraticFormPair,
    build_quadratic_forms,
    dhl_inference,
    enumerate_basis,
    gap_bound_chain,
    ij_monte_carlo,
    largest_generalized_eigenvalue,
    ldl_pivots,
    mk_lower_bound_g,
    mk_lower_bound_poly,
    optimize_g_bound,
    rayleigh_quotient,
)
from primelab.tuples import AdmissibleTuple, greedy_narrow_tuple


def synthetic_pair(a1, a2):
    n = len(a1)
    basis = tuple(BasisIndex(i, 0) for i in range(n))
    to_frac = lambda mat: [[Fraction(x) for x in row] for row in mat]
    return QuadraticFormPair(k=1, degree=n, basis=basis, A1=to_frac(a1), A2=to_frac(a2))


class TestBasis:
    def test_enumeration(self):
        assert enumerate_basis(0) == [BasisIndex(0, 0)]
        assert enumerate_basis(2) == [
            BasisIndex(0, 0),
            BasisIndex(0, 1),
            BasisIndex(1, 0),
            BasisIndex(2, 0),
        ]

    @pytest.mark.parametrize("degree,size", [(3, 6), (11, 42), (12, 49)])
    def test_sizes(self, degree, size):
        assert len(enumerate_basis(degree)) == size


class TestBuildQuadraticForms:
    def test_k1_constant(self):
        pair = build_quadratic_forms(1, 0)
        assert pair.A1 == [[Fraction(1)]]
        assert pair.A2 == [[Fraction(1)]]

    def test_k2_constant_ratio(self):
        pair = build_quadratic_forms(2, 0)
        assert pair.A1 == [[Fraction(1, 2)]]
        assert pair.A2 == [[Fraction(2, 3)]]

    def test_symmetry_and_definiteness(self):
        pair = build_quadratic_forms(4, 3)
        n = len(pair.basis)
        for i in range(n):
            for j in range(n):
                assert pair.A1[i][j] == pair.A1[j][i]
                assert pair.A2[i][j] == pair.A2[j][i]
        assert all(p > 0 for p in ldl_pivots(pair.A1))

    def test_entries_against_monte_carlo(self):
        pair = build_quadratic_forms(3, 2)
        basis = pair.basis
        m1, s1, m2, s2 = oracles.mc_form_entries(3, basis, 2_000_000, seed=20240811)
        n = len(basis)
        for i in range(n):
            for j in range(n):
                assert abs(float(pair.A1[i][j]) - m1[i, j]) <= 3 * s1[i, j] + 1e-12
                assert abs(float(pair.A2[i][j]) - m2[i, j]) <= 3 * s2[i, j] + 1e-12

    def test_basis_cap(self):
        with pytest.raises(CapacityError):
            build_quadratic_forms(5, 12, basis_cap=10)


class TestLdl:
    def test_rejects_indefinite(self):
        with pytest.raises(ConsistencyError):
            ldl_pivots([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(1)]])

    def test_pivots_match_minor_ratios(self):
        mat = [[Fraction(4), Fraction(2)], [Fraction(2), Fraction(3)]]
        pivots = ldl_pivots(mat)
        assert pivots == [Fraction(4), Fraction(3) - Fraction(1)]


class TestEigen:
    def test_identity_pair(self):
        pair = synthetic_pair([[1, 0], [0, 1]], [[1, 0], [0, 2]])
        lam, vec = largest_generalized_eigenvalue(pair)
        assert lam == pytest.approx(2.0, rel=1e-12)
        assert abs(vec[1]) == pytest.approx(1.0, rel=1e-9)

    def test_diagonal_pair(self):
        pair = synthetic_pair([[2, 0], [0, 1]], [[2, 0], [0, 3]])
        lam, _ = largest_generalized_eigenvalue(pair)
        assert lam == pytest.approx(3.0, rel=1e-12)

    def test_random_spd_pair_rayleigh_maximality(self):
        rng = np.random.default_rng(5)
        r1 = rng.integers(-3, 4, size=(5, 5))
        r2 = rng.integers(-3, 4, size=(5, 5))
        a1 = r1 @ r1.T + 5 * np.eye(5, dtype=int)
        a2 = (r2 + r2.T) // 1
        pair = synthetic_pair(a1.tolist(), a2.tolist())
        lam, vec = largest_generalized_eigenvalue(pair)
        witness = [Fraction(float(v)) for v in vec]
        exact = rayleigh_quotient(pair, witness)
        assert float(exact) == pytest.approx(lam, rel=1e-9)
        for _ in range(100):
            probe = [Fraction(float(v)) for v in rng.normal(size=5)]
            assert rayleigh_quotient(pair, probe) <= exact + Fraction(1, 10**12)

    def test_structural_error_on_indefinite_a1(self):
        pair = synthetic_pair([[1, 2], [2, 1]], [[1, 0], [0, 1]])
        with pytest.raises(ConsistencyError):
            largest_generalized_eigenvalue(pair)


class TestMkLowerBoundPoly:
    def test_k1_is_exactly_one(self):
        for degree in (0, 1, 2, 3):
            cert = mk_lower_bound_poly(1, degree)
            assert abs(cert.lower_bound - 1.0) <= 1e-9
            pair = build_quadratic_forms(1, degree)
            constant = [Fraction(0)] * len(pair.basis)
            constant[0] = Fraction(1)
            assert rayleigh_quotient(pair, constant) == 1

    def test_k5_degree3_exceeds_two(self):
        cert = mk_lower_bound_poly(5, 3)
        assert cert.lower_bound > 2.0
        assert cert.lower_bound == pytest.approx(2.002747193962, abs=1e-9)
        assert cert.residual <= 1e-9

    def test_certificate_self_verifies(self):
        cert = mk_lower_bound_poly(4, 2)
        pair = build_quadratic_forms(4, 2)
        requote = rayleigh_quotient(pair, cert.witness)
        assert requote == cert.exact_value
        assert abs(float(requote) - cert.lower_bound) <= 1e-9 * abs(cert.lower_bound)
        assert Fraction(cert.lower_bound) <= requote  # rounded down, never up

    def test_monotone_in_degree(self):
        bounds = [mk_lower_bound_poly(4, d).lower_bound for d in range(4)]
        assert bounds == sorted(bounds)

    def test_json_round_trip_recertifies(self):
        cert = mk_lower_bound_poly(3, 2)
        blob = json.loads(cert.to_json())
        witness = [Fraction(int(w["num"]), int(w["den"])) for w in blob["witness"]]
        pair = build_quadratic_forms(3, 2)
        value = oracles.exact_rational_requote(pair.A1, pair.A2, witness)
        assert value == cert.exact_value


class TestGBound:
    def test_flat_g_limit(self):
        # A -> 0 turns g constant: mass-center factor T/2, squared factor T
        p1 = GBoundParams(A=1e-9, T=0.5, k=10, variant="as-printed")
        p2 = GBoundParams(A=1e-9, T=0.5, k=10, variant="ratio-squared")
        gg_corr = 1 - 0.5 / (10 * (1 - 0.05 - p1.mu) ** 2)
        assert mk_lower_bound_g(p1) == pytest.approx(0.25 * gg_corr, rel=1e-6)
        assert mk_lower_bound_g(p2) == pytest.approx(0.5 * gg_corr, rel=1e-6)

    def test_closed_forms_against_quadrature(self):
        for A, T, k in ((0.7, 2.0, 30), (2.5, 4.0, 60), (5.0, 9.0, 200)):
            g = lambda t: 1.0 / (1.0 + A * t)
            gg = quad(lambda t: g(t) ** 2, 0, T)[0]
            tg = quad(lambda t: t * g(t) ** 2, 0, T)[0]
            g1 = quad(g, 0, T)[0]
            mu = tg / gg
            params = GBoundParams(A=A, T=T, k=k, variant="ratio-squared")
            assert params.mu == pytest.approx(mu, rel=1e-9)
            expected = (g1 * g1 / gg) * (1 - T / (k * (1 - T / k - mu) ** 2))
            assert mk_lower_bound_g(params) == pytest.approx(expected, rel=1e-9)

    def test_useless_bound_is_reported_not_raised(self):
        # large A concentrates g near 0, so mu is tiny, the preconditions
        # hold, and the correction factor goes strongly negative
        value = mk_lower_bound_g(GBoundParams(A=50.0, T=4.0, k=5, variant="ratio-squared"))
        assert value <= 0

    def test_preconditions_named(self):
        with pytest.raises(ValidationError, match="mu < 1"):
            mk_lower_bound_g(GBoundParams(A=0.001, T=900.0, k=1000))
        with pytest.raises(ValidationError, match="T < k"):
            mk_lower_bound_g(GBoundParams(A=50.0, T=90.0, k=100))

    def test_optimizer_feasible_at_k2(self):
        A, T, bound = optimize_g_bound(2)
        assert math.isfinite(bound)

    def test_optimizer_monotone_trend(self):
        _, _, b100 = optimize_g_bound(100)
        _, _, b1000 = optimize_g_bound(1000)
        assert b1000 >= b100

    def test_optimizer_reproducible(self):
        assert optimize_g_bound(300) == optimize_g_bound(300)

    def test_growth_target_split_by_variant(self):
        for k in (1000, 10000):
            target = math.log(k) - 2 * math.log(math.log(k)) - 2
            _, _, squared = optimize_g_bound(k, "ratio-squared")
            assert squared > target
            _, _, printed = optimize_g_bound(k, "as-printed")
            assert printed < target  # stays below 1, cannot reach the target


class TestMonteCarlo:
    def test_constant_f_on_triangle(self):
        est = ij_monte_carlo(2, [1.0], 0, 200_000, seed=9)
        assert est.i_value == pytest.approx(0.5, abs=1e-12)
        assert abs(est.j_value - 2.0 / 3.0) <= 3 * est.j_stderr

    def test_zero_coefficients(self):
        est = ij_monte_carlo(3, [0.0] * len(enumerate_basis(2)), 2, 10_000, seed=1)
        assert est.i_value == 0.0 and est.j_value == 0.0

    def test_agrees_with_exact_rayleigh(self):
        cert = mk_lower_bound_poly(3, 2)
        coeffs = [float(c) for c in cert.witness]
        est = ij_monte_carlo(3, coeffs, 2, 2_000_000, seed=20240812)
        ratio = est.j_value / est.i_value
        se = abs(ratio) * math.hypot(
            est.i_stderr / est.i_value, est.j_stderr / est.j_value
        )
        assert abs(ratio - cert.lower_bound) <= 3 * se

    def test_validation(self):
        with pytest.raises(ValidationError):
            ij_monte_carlo(2, [1.0], 0, 10, seed=0)
        with pytest.raises(ValidationError):
            ij_monte_carlo(2, [1.0, 2.0], 0, 10_000, seed=0)


class TestInference:
    def test_strictness_table(self):
        assert dhl_inference(4.01, 0.5, 1) is True
        assert dhl_inference(2.1, 1.0, 1) is True
        assert dhl_inference(4.0, 0.5, 1) is False

    def test_validation(self):
        with pytest.raises(ValidationError):
            dhl_inference(3.0, 0.0, 1)
        with pytest.raises(ValidationError):
            dhl_inference(3.0, 1.5, 1)
        with pytest.raises(ValidationError):
            dhl_inference(3.0, 0.5, 0)

    def test_chain_k5_conditional(self):
        tup = greedy_narrow_tuple(5, 16)
        report = gap_bound_chain(5, 3, 1.0, 1, tup)
        assert report.dhl_holds is True
        assert report.claimed_gap_bound == tup.diameter == 14
        assert report.failing_inequality is None

    def test_chain_failure_reports_inequality(self):
        tup = greedy_narrow_tuple(5, 16)
        report = gap_bound_chain(5, 3, 0.5, 1, tup)  # needs M_5 > 4
        assert report.dhl_holds is False
        assert report.claimed_gap_bound is None
        assert "does not strictly exceed" in report.failing_inequality

    def test_chain_rejects_inadmissible_tuple(self):
        fake = AdmissibleTuple(offsets=(0, 2, 4), certificate={})
        with pytest.raises(ValidationError):
            gap_bound_chain(3, 2, 0.5, 1, fake)
