import math
from fractions import Fraction

import pytest

from arctanpi.bignum import FixedPoint, PrecisionContext, from_rational, mul, sqrt_int
from arctanpi.derivative_engine import (
    ThetaFrame,
    closed_form_derivative,
    oracle_eval,
    poly_oracle_coeffs,
    sin_multiple_recurrence,
    theta_frame,
)

CTX = PrecisionContext(128)
GRID = [Fraction(k, 4) for k in range(-20, 21)]


def fx(q, ctx=CTX):
    q = Fraction(q)
    return from_rational(q.numerator, q.denominator, ctx)


def close(a, b, bits):
    return abs(a.mantissa - b.mantissa) <= 1 << bits


class TestExamples:
    def test_first_derivative_at_zero(self):
        assert closed_form_derivative(1, fx(0), CTX) == FixedPoint.one(128)

    def test_third_derivative_at_zero(self):
        assert closed_form_derivative(3, fx(0), CTX) == FixedPoint.from_int(-2, 128)

    def test_second_derivative_at_one(self):
        assert close(closed_form_derivative(2, fx(1), CTX), fx(Fraction(-1, 2)), 2)

    def test_second_derivative_at_minus_one(self):
        assert close(closed_form_derivative(2, fx(-1), CTX), fx(Fraction(1, 2)), 2)

    def test_literal_arcsin_reading_has_wrong_sign(self):
        v = closed_form_derivative(2, fx(-1), CTX, branch="arcsin")
        assert close(v, fx(Fraction(-1, 2)), 2)

    def test_order_zero_rejected(self):
        with pytest.raises(ValueError):
            closed_form_derivative(0, fx(1), CTX)
        with pytest.raises(ValueError):
            poly_oracle_coeffs(0)

    def test_unknown_branch(self):
        with pytest.raises(ValueError):
            theta_frame(fx(1), 64, branch="nope")


class TestSinRecurrence:
    def test_quarter_turns(self):
        frame = ThetaFrame(FixedPoint.one(64), FixedPoint.zero(64))
        got = sin_multiple_recurrence(frame, 4)
        assert got == [FixedPoint.one(64), FixedPoint.zero(64), -FixedPoint.one(64), FixedPoint.zero(64)]

    def test_x_equal_one(self):
        frame = theta_frame(fx(1), 128)
        s1, s2 = sin_multiple_recurrence(frame, 2)
        r2 = sqrt_int(2, CTX).div_int(2)
        assert close(s1, r2, 2)
        assert close(s2, FixedPoint.one(128), 2)

    def test_x_zero(self):
        frame = theta_frame(fx(0), 128)
        assert sin_multiple_recurrence(frame, 1) == [FixedPoint.one(128)]

    def test_n_max_positive(self):
        with pytest.raises(ValueError):
            sin_multiple_recurrence(theta_frame(fx(0), 64), 0)


class TestThetaFrame:
    @pytest.mark.parametrize("x", GRID)
    def test_pythagoras_and_sign(self, x):
        f = theta_frame(fx(x), 128)
        assert 0 < f.sin_theta.mantissa <= 1 << 128
        total = mul(f.sin_theta, f.sin_theta) + mul(f.cos_theta, f.cos_theta)
        assert abs(total.mantissa - (1 << 128)) <= 8
        assert f.cos_theta.sign() == (x > 0) - (x < 0)


class TestPolyOracle:
    def test_seed_and_first_steps(self):
        assert poly_oracle_coeffs(1).coeffs == (1,)
        assert poly_oracle_coeffs(2).coeffs == (0, -2)
        assert poly_oracle_coeffs(3).coeffs == (-2, 0, 6)

    def test_degree_and_parity(self):
        for n in range(1, 61):
            p = poly_oracle_coeffs(n)
            assert p.degree == n - 1
            assert p.coeffs[-1] != 0
            assert all(c == 0 for j, c in enumerate(p.coeffs) if (j - (n - 1)) % 2)

    def test_recurrence_is_quotient_rule(self):
        # independent check of the recurrence: d/dx [P_n/(1+x^2)^n] == P_{n+1}/(1+x^2)^{n+1}
        for n in range(1, 12):
            p, q = poly_oracle_coeffs(n), poly_oracle_coeffs(n + 1)
            dp = [j * c for j, c in enumerate(p.coeffs)][1:] or [0]
            for x in (Fraction(1, 3), Fraction(-2), Fraction(5, 7)):
                dpx = sum(c * x**j for j, c in enumerate(dp))
                lhs = (dpx * (1 + x * x) - 2 * n * x * p(x)) / (1 + x * x) ** (n + 1)
                assert lhs == q(x) / (1 + x * x) ** (n + 1)

    def test_values(self):
        assert oracle_eval(1, fx(0), CTX) == FixedPoint.one(128)
        assert close(oracle_eval(2, fx(1), CTX), fx(Fraction(-1, 2)), 1)
        assert oracle_eval(5, fx(0), CTX) == FixedPoint.from_int(24, 128)


class TestInvariants:
    @pytest.mark.parametrize("n", [1, 2, 3, 7, 12, 25])
    def test_oracle_equivalence_subset(self, n):
        for x in GRID:
            a = closed_form_derivative(n, fx(x), CTX)
            b = oracle_eval(n, fx(x), CTX)
            assert close(a, b, 10), (n, x)

    def test_parity(self):
        for n in range(1, 26):
            for x in GRID[21:]:
                pos = closed_form_derivative(n, fx(x), CTX)
                neg = closed_form_derivative(n, fx(-x), CTX)
                expected = pos if n % 2 else -pos
                assert close(neg, expected, 10)

    def test_values_at_zero_exact(self):
        for n in range(1, 31):
            v = closed_form_derivative(n, fx(0), CTX)
            if n % 2 == 0:
                assert v.is_zero()
            else:
                sign = -1 if ((n - 1) // 2) % 2 else 1
                assert v == FixedPoint.from_int(sign * math.factorial(n - 1), 128)

    @pytest.mark.parametrize("x", [Fraction(1, 4), Fraction(1), Fraction(3), Fraction(5, 2)])
    def test_recurrence_matches_chebyshev_expansion(self, x):
        # for x > 0: sin(n*arcsin(s)) in powers of s, with c = sqrt(1 - s^2) >= 0
        frame = theta_frame(fx(x), 160)
        s = frame.sin_theta
        one = FixedPoint.one(160)
        c = FixedPoint(math.isqrt(((one - mul(s, s)).mantissa) << 160), 160)

        def p(*coeffs):
            acc = FixedPoint.zero(160)
            for k, a in enumerate(coeffs):
                term = one
                for _ in range(k):
                    term = mul(term, s)
                acc = acc + term.mul_int(a)
            return acc

        expected = [
            s,
            mul(c, s.mul_int(2)),
            p(0, 3, 0, -4),
            mul(c, p(0, 4, 0, -8)),
            p(0, 5, 0, -20, 0, 16),
            mul(c, p(0, 6, 0, -32, 0, 32)),
        ]
        got = sin_multiple_recurrence(frame, 6)
        for g, e in zip(got, expected):
            assert abs(g.mantissa - e.mantissa) <= 1 << 40
