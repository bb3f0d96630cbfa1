import random
from fractions import Fraction

import mpmath as mp
import pytest

from oracles import lovasz_holds, shortest_vector_brute
from quadexp.errors import (DegenerateBasis, DomainError, InputRational,
                            InsufficientPrecision)
from quadexp.modular import hcf_generator
from quadexp.numerics import FixedComplex, FixedReal
from quadexp.quadfield import OrderDescriptor, QuadraticIrrational, fundamental_unit
from quadexp.recognition import (JValue, Membership, NotFound, _int_det,
                                 conjugacy_classes, evaluate_J, j_function,
                                 lll_reduce, member_of_field, min_poly)


def real_probe(value_str: str, p: int, digits: int) -> FixedComplex:
    """Exact truncation of a decimal constant to p bits."""
    mp.mp.dps = digits + 30
    v = mp.mpf(value_str) if value_str[0].isdigit() else getattr(mp, value_str)
    man = int(mp.floor(v * (1 << p)))
    return FixedComplex.from_real(FixedReal(man, p, 0))


class TestLLL:
    def test_identity(self):
        r = lll_reduce([[1, 0], [0, 1]])
        assert r.basis == [[1, 0], [0, 1]]
        assert r.transform == [[1, 0], [0, 1]]

    def test_lovasz_bound_on_skewed_basis(self):
        rows = [[1, 10**6], [0, 1]]
        r = lll_reduce(rows)
        # first vector within the LLL quality bound of det^(1/2)
        norm2 = sum(x * x for x in r.basis[0])
        assert norm2 <= 2 * 10**6  # 2^((n-1)/2) * sqrt(det), squared
        assert lovasz_holds(r.basis, Fraction(99, 100))

    def test_exact_lovasz_on_random(self):
        rng = random.Random(5)
        for _ in range(20):
            n = rng.randint(2, 5)
            rows = [[rng.randint(-999, 999) for _ in range(n + 1)] for _ in range(n)]
            try:
                r = lll_reduce(rows)
            except DegenerateBasis:
                continue
            assert lovasz_holds(r.basis, Fraction(99, 100))

    def test_shortest_vector_quality(self):
        rng = random.Random(11)
        for _ in range(10):
            rows = [[rng.randint(-1000, 1000) for _ in range(4)] for _ in range(4)]
            try:
                r = lll_reduce(rows)
            except DegenerateBasis:
                continue
            best = shortest_vector_brute(rows, 4)
            norm2 = sum(x * x for x in r.basis[0])
            assert norm2 <= 8 * best  # (2^(3/2))^2

    def test_unimodular_transform(self):
        rng = random.Random(3)
        for _ in range(15):
            n = rng.randint(2, 5)
            rows = [[rng.randint(-500, 500) for _ in range(n)] for _ in range(n)]
            try:
                r = lll_reduce(rows, check_transform=True)
            except DegenerateBasis:
                continue
            assert _int_det(r.transform) in (1, -1)
            # transform really maps input to output
            m = len(rows[0])
            for i in range(n):
                got = [sum(r.transform[i][k] * rows[k][j] for k in range(n))
                       for j in range(m)]
                assert got == r.basis[i]

    def test_dependent_rows(self):
        with pytest.raises(DegenerateBasis):
            lll_reduce([[1, 2], [2, 4]])


class TestMinPoly:
    def test_sqrt2_at_200_digits(self):
        p = 665
        z = FixedComplex.from_real(QuadraticIrrational.sqrt_of(2).to_fixed(p))
        r = min_poly(z, 4, 10**6, p)
        assert r.recognized
        assert r.verdict.minpoly.coefficients == (-2, 0, 1)

    def test_exact_rational(self):
        r = min_poly(FixedComplex.from_int(1728, 512), 4, 10**6, 512)
        assert r.recognized
        assert r.verdict.minpoly.coefficients == (-1728, 1)

    def test_golden_ratio(self):
        p = 665
        z = FixedComplex.from_real(QuadraticIrrational(1, 1, 2, 5).to_fixed(p))
        r = min_poly(z, 4, 10**6, p)
        assert r.verdict.minpoly.coefficients == (-1, -1, 1)

    def test_complex_quadratic(self):
        # z = (1 + i sqrt 3)/2 has minimal polynomial x^2 - x + 1
        p = 512
        from quadexp.numerics import sqrt_fixed
        z = FixedComplex(FixedReal.from_ratio(1, 2, p), sqrt_fixed(3, p).div_int(2))
        r = min_poly(z, 6, 10**6, p)
        assert r.recognized
        assert r.verdict.minpoly.coefficients == (1, -1, 1)

    def test_pi_negative_control(self):
        z = real_probe("pi", 499, 150)
        r = min_poly(z, 8, 10**12, 499)
        assert not r.recognized
        assert r.verdict.exclusion_height > 10**12
        assert r.to_json()["verdict"] == "no_relation"

    def test_insufficient_precision_rejected(self):
        p = 128
        noisy = FixedComplex(FixedReal(1 << p, p, 1 << 100), FixedReal.zero(p))
        with pytest.raises(InsufficientPrecision):
            min_poly(noisy, 4, 10**6, p)

    def test_json_shape(self):
        r = min_poly(FixedComplex.from_int(7, 256), 2, 100, 256)
        blob = r.to_json()
        assert blob["verdict"] == "recognized"
        assert blob["minpoly"] == [-7, 1]
        assert set(blob) >= {"verdict", "minpoly", "residual_log10",
                             "deg_bound", "height_bound", "precision_bits"}

    def test_recognized_residual_shrinks_at_2p(self):
        # stability contract: rerunning at doubled precision re-confirms the
        # verdict and the residual shrinks by at least 10^(0.5 digits)
        p = 512
        z = QuadraticIrrational.sqrt_of(7)
        r1 = min_poly(FixedComplex.from_real(z.to_fixed(p)), 4, 10**6, p)
        r2 = min_poly(FixedComplex.from_real(z.to_fixed(2 * p)), 4, 10**6, 2 * p)
        assert r1.recognized and r2.recognized
        assert r1.verdict.minpoly.coefficients == r2.verdict.minpoly.coefficients
        digits = int(p * 0.30103)
        assert r1.verdict.residual_log10 - r2.verdict.residual_log10 >= 0.5 * digits


class TestJEvaluation:
    def test_probe_log_y_only(self):
        # x = 0 degenerate probe: J = log y
        p = 256
        mp.mp.dps = 100
        y = FixedReal.from_int(3, p)
        J = j_function(FixedReal.zero(p), y, p)
        assert abs(float(J.re.to_decimal(30)) - float(mp.log(3))) < 1e-25
        assert abs(J.im.mantissa) <= J.im.err_ulps + 2

    def test_probe_half_e_e(self):
        p = 256
        mp.mp.dps = 100
        man = int(mp.floor(mp.exp(mp.e) * (1 << p)))
        J = j_function(FixedReal.from_ratio(1, 2, p), FixedReal(man, p, 1), p)
        assert abs(float(J.re.to_decimal(30)) + float(mp.e)) < 1e-25

    def test_evaluate_J_requires_irrational(self):
        eps = fundamental_unit(OrderDescriptor("real", 15, 1))
        theta = QuadraticIrrational.from_rational(Fraction(1, 2))
        with pytest.raises(InputRational):
            evaluate_J(theta, eps, 128)
        jv = evaluate_J(theta, eps, 128, allow_rational_theta=True)
        # e^{pi i} = -1, so J = -log(eps)
        assert jv.value.re.indistinguishable(-jv.mu)

    def test_epsilon_above_one_required(self):
        from quadexp.quadfield import UnitElement
        eps = fundamental_unit(OrderDescriptor("real", 15, 1))
        small = UnitElement(QuadraticIrrational.from_rational(1), 1)
        with pytest.raises(DomainError):
            evaluate_J(QuadraticIrrational.sqrt_of(15), small, 128)

    def test_value_at_sqrt15(self):
        theta = QuadraticIrrational.sqrt_of(15)
        eps = fundamental_unit(OrderDescriptor("real", 15, 1))
        jv = evaluate_J(theta, eps, 512)
        assert jv.mu.to_decimal(16).startswith("2.063437068895560")
        mp.mp.dps = 200
        ref = mp.log(4 + mp.sqrt(15)) * mp.expjpi(2 * mp.sqrt(15))
        assert abs(float(jv.value.re.to_decimal(40)) - float(ref.real)) < 1e-35
        assert abs(float(jv.value.im.to_decimal(40)) - float(ref.imag)) < 1e-35

    def test_dual_route_agreement_sample(self):
        # the two formulas agree within combined bounds on random probes
        rng = random.Random(2024)
        p = 256
        for _ in range(100):
            x = FixedReal.from_ratio(rng.randrange(-10**6, 10**6), 10**6 + 3, p)
            y = FixedReal.from_ratio(rng.randrange(10**6 + 1, 10**9), 10**6, p)
            j_function(x, y, p)  # raises if the routes disagree

    def test_mu_additivity(self):
        # log(eps^n) = n log(eps) within bounds, n <= 10
        p = 320
        eps = fundamental_unit(OrderDescriptor("real", 15, 1))
        theta = QuadraticIrrational.sqrt_of(15)
        base = evaluate_J(theta, eps, p).mu
        from quadexp.quadfield import UnitElement
        for n in range(1, 11):
            pw = UnitElement(eps.value**n, eps.norm if n % 2 else 1)
            jn = evaluate_J(theta, pw, p)
            assert jn.mu.indistinguishable(base * n), n


class TestConjugacy:
    def test_plus_minus_sqrt2(self):
        p = 512
        eps = fundamental_unit(OrderDescriptor("real", 2, 1))
        r2 = QuadraticIrrational.sqrt_of(2).to_fixed(p)
        vals = [JValue(QuadraticIrrational.sqrt_of(2), eps, r2,
                       FixedComplex.from_real(r2), p),
                JValue(QuadraticIrrational.sqrt_of(2), eps, r2,
                       FixedComplex.from_real(-r2), p)]
        part = conjugacy_classes(vals, 4, 10**6)
        assert len(part.classes) == 1
        assert part.classes[0][0].coefficients == (-2, 0, 1)
        assert part.classes[0][1] == [0, 1]

    def test_sqrt2_sqrt3_distinct(self):
        p = 512
        eps = fundamental_unit(OrderDescriptor("real", 2, 1))
        vals = []
        for d in (2, 3):
            x = QuadraticIrrational.sqrt_of(d).to_fixed(p)
            vals.append(JValue(QuadraticIrrational.sqrt_of(d), eps, x,
                               FixedComplex.from_real(x), p))
        part = conjugacy_classes(vals, 4, 10**6)
        assert len(part.classes) == 2 and not part.unresolved

    def test_pi_unresolved(self):
        p = 499
        eps = fundamental_unit(OrderDescriptor("real", 2, 1))
        z = real_probe("pi", p, 150)
        vals = [JValue(QuadraticIrrational.sqrt_of(2), eps, z.re, z, p)]
        part = conjugacy_classes(vals, 8, 10**12)
        assert part.unresolved == [0]


@pytest.fixture(scope="module")
def field15():
    return hcf_generator(15, 1, 512)


class TestMembership:

    def test_gamma_itself(self, field15):
        m = member_of_field(field15.generator_embedding, field15, 512)
        assert isinstance(m, Membership)
        assert m.coordinates == [Fraction(0), Fraction(1), Fraction(0), Fraction(0)]

    def test_synthesized_combination(self, field15):
        g = field15.generator_embedding
        z = FixedComplex.from_int(3, 512) - (g * g) * 2
        m = member_of_field(z, field15, 512)
        assert isinstance(m, Membership)
        assert m.coordinates == [Fraction(3), Fraction(0), Fraction(-2), Fraction(0)]

    def test_pi_not_found(self, field15):
        z = real_probe("pi", 499, 150)
        m = member_of_field(z, field15, 499, height_bound=10**12)
        assert isinstance(m, NotFound)
        assert m.to_json()["found"] is False
        assert m.exclusion_height > 0

    def test_rational_coordinates(self, field15):
        g = field15.generator_embedding
        z = (FixedComplex.from_int(1, 512) + g) / 3
        m = member_of_field(z, field15, 512)
        assert isinstance(m, Membership)
        assert m.coordinates == [Fraction(1, 3), Fraction(1, 3),
                                 Fraction(0), Fraction(0)]
