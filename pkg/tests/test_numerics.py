import random
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from quadexp.errors import DomainError
from quadexp.numerics import (FixedComplex, FixedReal, exp_cis, exp_fixed,
                              log_fixed, pi_fixed, sqrt_fixed, _log_positive)


def ulp_of(x: FixedReal) -> int:
    """Value-relative ulp count: 2**(exponent(x) - scale)."""
    return max(1, 1 << max(0, abs(x.mantissa).bit_length() - x.scale_bits))


class TestSqrt:
    def test_zero(self):
        s = sqrt_fixed(0, 64)
        assert s.mantissa == 0 and s.err_ulps == 0

    def test_perfect_square(self):
        s = sqrt_fixed(16, 64)
        assert s.mantissa == 4 << 64
        assert s.err_ulps == 0

    def test_sqrt2_squared_close(self):
        s = sqrt_fixed(2, 256)
        sq = s * s
        diff = sq - FixedReal.from_int(2, 256)
        bound = abs(diff.mantissa) + diff.err_ulps
        assert bound < 1 << (256 - 250)

    def test_small_n_four_ulps_exact(self):
        # exact integer comparison of mantissa^2 against n << 2p
        p = 128
        for n in (2, 3, 4):
            m = sqrt_fixed(n, p).mantissa
            assert abs(m * m - (n << (2 * p))) <= 4 << p

    def test_general_square_gap(self):
        from math import isqrt
        p = 128
        for n in (5, 7, 15, 163, 9999):
            s = sqrt_fixed(n, p)
            assert s.err_ulps <= 2
            gap = abs(s.mantissa**2 - (n << (2 * p)))
            assert gap <= (2 * isqrt(n) + 3) << p

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            sqrt_fixed(-1, 64)


class TestExpCis:
    def test_identity(self):
        z = exp_cis(FixedReal.from_int(0, 128), 128)
        assert z.re.mantissa == 1 << 128
        assert z.im.mantissa == 0

    def test_half_turn(self):
        z = exp_cis(FixedReal.from_ratio(1, 2, 128), 128)
        assert abs(z.re.mantissa + (1 << 128)) <= 8
        assert abs(z.im.mantissa) <= 8
        assert z.re.err_ulps <= 8

    def test_sixth_root_cubed(self):
        z = exp_cis(FixedReal.from_ratio(1, 6, 256), 256)
        w = z * z * z
        re_gap = abs(w.re.mantissa + (1 << 256)) + w.re.err_ulps
        im_gap = abs(w.im.mantissa) + w.im.err_ulps
        assert re_gap < 1 << (256 - 240)
        assert im_gap < 1 << (256 - 240)

    def test_integer_reduction_exact(self):
        # theta and theta + 7 give bit-identical results
        t = FixedReal.from_ratio(3, 7, 192)
        a = exp_cis(t, 192)
        b = exp_cis(t + 7, 192)
        assert a.re.mantissa == b.re.mantissa
        assert a.im.mantissa == b.im.mantissa

    def test_modulus_one_random(self):
        rng = random.Random(12345)
        one = FixedReal.from_int(1, 256)
        for _ in range(200):
            t = FixedReal.from_ratio(rng.randrange(-10**9, 10**9), 10**9 + 7, 256)
            z = exp_cis(t, 256)
            assert z.abs2().indistinguishable(one)

    def test_against_mpmath(self):
        mp.mp.dps = 60
        t = FixedReal.from_ratio(1234567, 9999991, 160)
        z = exp_cis(t, 160)
        ref = mp.expjpi(2 * mp.mpf(1234567) / 9999991)
        assert abs(float(z.re.to_decimal(30)) - float(ref.real)) < 1e-28
        assert abs(float(z.im.to_decimal(30)) - float(ref.imag)) < 1e-28


class TestLogExp:
    def test_log_near_one(self):
        p = 128
        x = FixedReal((1 << p) + 1, p, 0)  # 1 + 2^-p
        lg = log_fixed(x, p)
        assert abs(lg.mantissa - 1) <= 2

    def test_log_e_squared_roundtrip(self):
        p = 128
        e2 = exp_fixed(FixedReal.from_int(2, p), p)
        lg = log_fixed(e2, p)
        diff = lg - FixedReal.from_int(2, p)
        assert abs(diff.mantissa) <= diff.err_ulps + 8

    def test_log_epsilon15(self):
        # verify by exponentiating back at 256 bits
        from quadexp.quadfield import QuadraticIrrational
        p = 256
        eps = QuadraticIrrational(4, 1, 1, 15).to_fixed(p)
        lg = log_fixed(eps, p)
        back = exp_fixed(lg, p)
        diff = back - eps
        assert abs(diff.mantissa) <= diff.err_ulps + 8
        # independent digits from mpmath
        mp.mp.dps = 100
        ref = Fraction(mp.nstr(mp.log(4 + mp.sqrt(15)), 90, strip_zeros=False))
        mine = Fraction(lg.mantissa, 1 << p)
        assert abs(mine - ref) < Fraction(1, 10**70)
        assert lg.to_decimal(16).startswith("2.063437068895560")

    def test_log_domain(self):
        p = 96
        with pytest.raises(DomainError):
            log_fixed(FixedReal.from_int(1, p), p)
        with pytest.raises(DomainError):
            log_fixed(FixedReal.from_ratio(1, 2, p), p)

    def test_internal_log_below_one(self):
        p = 160
        x = FixedReal.from_ratio(1, 2, p)
        lg = _log_positive(x, p)
        mp.mp.dps = 60
        assert abs(float(lg.to_decimal(30)) - float(mp.log(0.5))) < 1e-28

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=2, max_value=10**6),
           st.integers(min_value=1, max_value=10**6))
    def test_roundtrip_property(self, num, den):
        # x in (1, 10^6], p >= 128: |exp(log x) - x| <= 16 ulps of x
        if num * 10**6 <= den:
            num = den + 1
        p = 128
        x = FixedReal.from_ratio(num * 10**6 + den, den, p)
        back = exp_fixed(log_fixed(x, p), p)
        diff = back - x
        assert abs(diff.mantissa) <= 16 * ulp_of(x) + diff.err_ulps


class TestPrecisionMonotone:
    def check(self, make):
        p = 192
        a = make(p)
        b = make(p + 64).rescale(p)
        assert a.indistinguishable(b)

    def test_sqrt(self):
        self.check(lambda p: sqrt_fixed(7, p))

    def test_pi(self):
        self.check(pi_fixed)

    def test_log(self):
        self.check(lambda p: log_fixed(FixedReal.from_int(3, p), p))

    def test_exp_cis(self):
        def make(p):
            return exp_cis(FixedReal.from_ratio(5, 17, p), p).re
        self.check(make)


class TestErrorPropagation:
    @settings(max_examples=150, deadline=None)
    @given(st.integers(min_value=-10**12, max_value=10**12),
           st.integers(min_value=-10**12, max_value=10**12),
           st.integers(min_value=1, max_value=10**6))
    def test_product_interval_containment(self, ma, mb, den):
        # declared error bounds must contain the exact rational product
        p = 64
        a = FixedReal.from_ratio(ma, den, p)
        b = FixedReal.from_ratio(mb, den, p)
        prod = a * b
        exact = Fraction(ma, den) * Fraction(mb, den)
        gap = abs(Fraction(prod.mantissa, 1 << p) - exact)
        assert gap <= Fraction(prod.err_ulps, 1 << p)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=1, max_value=10**12),
           st.integers(min_value=1, max_value=10**12))
    def test_division_interval_containment(self, ma, mb):
        p = 96
        a = FixedReal.from_ratio(ma, 10**6, p)
        b = FixedReal.from_ratio(mb, 10**6, p)
        if b.mantissa <= 2 * b.err_ulps:
            return
        quot = a / b
        exact = Fraction(ma, 10**6) / Fraction(mb, 10**6)
        gap = abs(Fraction(quot.mantissa, 1 << p) - exact)
        assert gap <= Fraction(quot.err_ulps, 1 << p)

    def test_pi_digits(self):
        mp.mp.dps = 120
        mine = Fraction(pi_fixed(320).mantissa, 1 << 320)
        ref = Fraction(mp.nstr(mp.pi, 110, strip_zeros=False))
        assert abs(mine - ref) < Fraction(1, 10**95)


class TestConstantCacheConcurrency:
    def test_parallel_pi_requests(self):
        import threading
        results = []

        def worker(p):
            results.append((p, pi_fixed(p).mantissa))

        threads = [threading.Thread(target=worker, args=(256 + 32 * (i % 4),))
                   for i in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        by_p = {}
        for p, man in results:
            by_p.setdefault(p, set()).add(man)
        assert all(len(s) == 1 for s in by_p.values())


class TestFixedComplex:
    def test_div_roundtrip(self):
        p = 128
        a = FixedComplex(FixedReal.from_ratio(3, 7, p), FixedReal.from_ratio(-2, 5, p))
        b = FixedComplex(FixedReal.from_ratio(1, 3, p), FixedReal.from_ratio(4, 9, p))
        back = (a / b) * b
        assert back.indistinguishable(a)

    def test_modulus_derived(self):
        p = 128
        z = FixedComplex(FixedReal.from_ratio(3, 5, p), FixedReal.from_ratio(4, 5, p))
        assert z.abs2().indistinguishable(FixedReal.from_int(1, p))
