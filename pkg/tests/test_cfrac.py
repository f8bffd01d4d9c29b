import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mixlab.cfrac import (
    AXIS_OF,
    Coset,
    Digits,
    ExtendedPoint,
    axis_permutation,
    branch_matrix,
    cf_digits,
    cf_value,
    continuant,
    convergent_matrix,
    coset_act,
    expansion,
    extended_shift,
    gauss_shift,
    mobius,
    shift_matrix,
)
from mixlab.exceptions import CuspError, DomainError
from mixlab.surd import QuadraticSurd

import oracles

digit_lists = st.lists(st.integers(1, 50), min_size=1, max_size=40)
odd_matrices = st.tuples(*[st.integers(-9, 9)] * 4).filter(
    lambda t: (t[0] * t[3] - t[1] * t[2]) % 2 == 1
).map(lambda t: ((t[0], t[1]), (t[2], t[3])))


class TestDigits:
    def test_half_terminates(self):
        d = cf_digits(0.5, 3)
        assert d == [2] and d.terminated and not d.truncated

    def test_golden(self):
        assert cf_digits("golden", 5) == [1, 1, 1, 1, 1]
        assert cf_digits((math.sqrt(5) - 1) / 2, 5) == [1] * 5

    def test_silver(self):
        assert cf_digits("sqrt2m1", 4) == [2, 2, 2, 2]
        assert cf_digits(math.sqrt(2) - 1, 4) == [2, 2, 2, 2]

    def test_float_matches_high_precision(self):
        x = math.pi - 3
        d = cf_digits(x, 30)
        assert d.truncated
        assert list(d) == oracles.mp_digits(repr(x), len(d))

    def test_float_stops_near_machine_precision(self):
        d = cf_digits((math.sqrt(5) - 1) / 2, 200)
        assert d.truncated and 20 < len(d) < 45
        assert continuant(d) <= 2**53

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            cf_digits(bad, 3)

    @given(st.fractions(min_value=Fraction(1, 10**6), max_value=1 - Fraction(1, 10**6)))
    def test_rational_roundtrip(self, x):
        assume(0 < x < 1)
        d = cf_digits(x, 10**4)
        assert d.terminated
        assert cf_value(d) == x
        if len(d) > 1:
            assert d[-1] != 1  # canonical short form

    @given(st.integers(2, 10**6), st.integers(1, 30), st.integers(1, 30))
    def test_surd_against_mpmath(self, d, a, c):
        assume(math.isqrt(d) ** 2 != d)
        x = QuadraticSurd.from_abcd(a, 1, d, c)
        frac = float(x) % 1
        assume(0.01 < frac < 0.99)
        x = x - math.floor(float(x))
        got = list(cf_digits(x, 25))
        want = oracles.mp_digits(lambda: (x.P + mpmath.sqrt(x.D)) / x.Q, 25)
        assert got == want

    def test_json(self):
        assert Digits([1, 2]).to_json() == [1, 2]
        with pytest.raises(DomainError):
            Digits([0, 1])


class TestConvergents:
    def test_examples(self):
        assert cf_value([2]) == Fraction(1, 2)
        assert cf_value([1, 1, 1]) == Fraction(2, 3)
        assert cf_value([2, 2, 2, 2]) == Fraction(12, 29)
        assert convergent_matrix([1, 1, 1]) == ((1, 2), (2, 3))
        assert convergent_matrix([7]) == ((0, 1), (1, 7))

    @given(digit_lists)
    def test_recursion_and_determinant(self, d):
        (p0, p1), (q0, q1) = convergent_matrix(d)
        assert abs(p0 * q1 - p1 * q0) == 1
        assert Fraction(p1, q1) == oracles.fold(d)
        if len(d) > 2:
            (_, pp), (_, qp) = convergent_matrix(d[:-1])
            (_, ppp), (_, qpp) = convergent_matrix(d[:-2])
            assert (p0, q0) == (pp, qp)
            assert p1 == d[-1] * pp + ppp and q1 == d[-1] * qp + qpp

    @given(st.lists(st.integers(1, 9), min_size=70, max_size=300))
    def test_product_tree_matches_plain_recursion(self, d):
        p0, p1, q0, q1 = 1, 0, 0, 1
        for k in d:
            p0, p1 = p1, k * p1 + p0
            q0, q1 = q1, k * q1 + q0
        assert convergent_matrix(d) == ((p0, p1), (q0, q1))

    @given(st.floats(1e-6, 1 - 1e-6))
    def test_approximation(self, x):
        d = cf_digits(x, 40)
        for c in oracles.fraction_convergents(list(d)):
            assert abs(Fraction(x) - c) <= Fraction(1, c.denominator**2)


class TestShift:
    def test_examples(self):
        assert gauss_shift(Fraction(1, 2)) == 0
        assert gauss_shift(Fraction(2, 5)) == Fraction(1, 2)
        g = (math.sqrt(5) - 1) / 2
        assert abs(gauss_shift(g) - g) < 1e-12
        assert gauss_shift(0) == 0

    def test_extended_examples(self):
        p = extended_shift(ExtendedPoint(Fraction(1, 2), "0"))
        assert p.x == 0 and p.s is Coset.INF
        q = extended_shift(ExtendedPoint(QuadraticSurd.from_abcd(-1, 1, 5, 2), "1"))
        # digit 1 is odd: the coset rule sends 1 to 0
        assert q.s is Coset.ZERO
        with pytest.raises(CuspError):
            extended_shift(ExtendedPoint(0.0, "0"))

    def test_coset_examples(self):
        assert coset_act(((0, 1), (1, 0)), "0") is Coset.INF
        even = {str(s): str(coset_act(branch_matrix(2), s)) for s in Coset.ORDER}
        assert even == {"0": "inf", "1": "1", "inf": "0"}
        odd = {str(s): str(coset_act(branch_matrix(1), s)) for s in Coset.ORDER}
        assert odd == {"inf": "0", "0": "1", "1": "inf"}
        with pytest.raises(DomainError):
            coset_act(((2, 0), (0, 1)), "0")

    @given(odd_matrices, odd_matrices, st.sampled_from(Coset.ORDER))
    def test_group_action(self, m1, m2, s):
        prod = tuple(
            tuple(sum(m1[i][k] * m2[k][j] for k in range(2)) for j in range(2)) for i in range(2)
        )
        assert coset_act(prod, s) == coset_act(m1, coset_act(m2, s))
        assert coset_act(m1, s).index == oracles.p1_act(m1, s.index)

    @given(st.integers(1, 10**6), st.sampled_from(Coset.ORDER))
    def test_parity_rule(self, k, s):
        assert coset_act(shift_matrix(k), s) == coset_act(shift_matrix(2 - k % 2), s)
        # branch and shift matrices are mutually inverse on P^1(F_2)
        assert coset_act(branch_matrix(k), coset_act(shift_matrix(k), s)) == s

    @given(st.floats(1e-4, 1 - 1e-4), st.integers(1, 10), st.sampled_from(Coset.ORDER))
    def test_convergent_matrix_acts_as_power(self, x, n, s):
        # T^n x must not land on the discontinuity at 0, where the oracle's rounding flips to 1
        assume(len(cf_digits(Fraction(x), n + 1)) > n)
        d = cf_digits(Fraction(x), n)
        (p0, p1), (q0, q1) = convergent_matrix(d)
        inverse = ((q1, -p1), (-q0, p0))  # inverse up to the sign det = +-1
        y = mobius(inverse, Fraction(x))
        p = ExtendedPoint(Fraction(x), s)
        for _ in range(n):
            p = extended_shift(p)
        assert y == p.x  # exact on rationals
        assert abs(float(y) - oracles.gauss_power_digits_oracle(x, n)) < 1e-9
        assert coset_act(inverse, s) == p.s


class TestAxes:
    def test_even(self):
        assert axis_permutation(2) == "xzy"

    def test_odd_is_product(self):
        # (12)(3) first, then (1)(23), on the images of x, y, z
        first = {"x": "y", "y": "x", "z": "z"}
        second = {"x": "x", "y": "z", "z": "y"}
        want = "".join(second[first[a]] for a in "xyz")
        assert axis_permutation(3) == want == "zxy"

    @given(st.integers(1, 1000))
    def test_transport(self, k):
        perm = axis_permutation(k)
        for a, image in zip("xyz", perm):
            s = next(c for c, ax in AXIS_OF.items() if ax == a)
            assert AXIS_OF[coset_act(shift_matrix(k), s)] == image

    @pytest.mark.parametrize("bad", [0, -1, 1.5])
    def test_bad(self, bad):
        with pytest.raises(DomainError):
            axis_permutation(bad)


class TestExpansion:
    def test_prefix_and_exact(self):
        e = expansion([3, 1, 2])
        assert list(e.digits(5)) == [3, 1, 2] and e.digits(5).truncated
        assert expansion(Fraction(5, 19)).digits(9).terminated

    @given(st.lists(st.integers(1, 30), min_size=2, max_size=30))
    def test_shift_consistency(self, d):
        e = expansion(d)
        tails = list(e.tails(len(d)))
        shifted = list(e.shift().tails(len(d)))
        assert tails[1:] == shifted
