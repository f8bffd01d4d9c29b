import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mixlab.cfrac import Coset, axis_permutation, coset_act, shift_matrix
from mixlab.exceptions import CuspError, DomainError
from mixlab.mixmaster import (
    GOLDEN,
    GeodesicData,
    KasnerTransformer,
    amplitude_from_v,
    axis_frequencies,
    era_transition,
    evolve_universe,
    inverse_two_sided_shift,
    kasner_exponents,
    two_sided_shift,
    v_evolution,
)
from mixlab.surd import QuadraticSurd

import oracles


def surds():
    return st.tuples(st.integers(2, 10**5), st.integers(1, 40), st.integers(1, 40)).filter(
        lambda t: math.isqrt(t[0]) ** 2 != t[0]
    ).map(lambda t: QuadraticSurd.from_abcd(t[1], 1, t[0], t[2])).map(
        lambda x: x - math.floor(float(x))
    ).filter(lambda x: 1e-6 < float(x) < 1 - 1e-6)


class TestKasner:
    def test_examples(self):
        assert kasner_exponents(1).as_tuple() == pytest.approx((-1 / 3, 2 / 3, 2 / 3))
        assert kasner_exponents(2).as_tuple() == pytest.approx((-2 / 7, 3 / 7, 6 / 7))
        assert kasner_exponents(math.inf).as_tuple() == (0.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            kasner_exponents(0.5)

    @given(st.fractions(1, 10**4))
    def test_against_exact(self, u):
        got = kasner_exponents(u).as_tuple()
        want = oracles.kasner_oracle(u)
        assert got == pytest.approx([float(w) for w in want], rel=1e-13, abs=1e-15)

    @given(st.floats(1, 1e6))
    def test_constraints_and_order(self, u):
        p = kasner_exponents(u)
        assert abs(sum(p.as_tuple()) - 1) <= 1e-12
        assert abs(sum(v * v for v in p.as_tuple()) - 1) <= 1e-12
        assert p.p1 <= p.p2 <= p.p3
        if u > 1:
            assert p.p1 < p.p2 < p.p3

    def test_limit_monotone(self):
        us = np.geomspace(1, 1e8, 50)
        p3 = [kasner_exponents(u).p3 for u in us]
        assert np.all(np.diff(p3) > 0) and p3[-1] == pytest.approx(1, abs=1e-7)

    def test_transformer(self):
        X = np.array([[1.0], [2.0]])
        out = KasnerTransformer().fit_transform(X)
        assert out.shape == (2, 3)
        assert out[1] == pytest.approx([-2 / 7, 3 / 7, 6 / 7])


class TestTransitions:
    def test_bounce(self):
        assert era_transition(0.5) == 2
        assert era_transition(0.4) == 2.5
        with pytest.raises(DomainError):
            era_transition(1.5)
        with pytest.raises(CuspError):
            era_transition(0)

    def test_era_composition(self):
        # u0 = 3.8 has three cycles, then bounces to 1.25
        t = evolve_universe(GeodesicData(Fraction(5, 19)), 2)
        assert t[0].u == pytest.approx(3.8) and t[0].n_cycles == 3
        assert t[1].u == pytest.approx(1.25)
        assert [c.u for c in t[0].cycles] == pytest.approx([3.8, 2.8, 1.8])

    def test_v(self):
        assert v_evolution(1, 1) == 0.5
        k = 3
        y = (math.sqrt(k * k + 4) - k) / 2
        assert v_evolution(y, k) == pytest.approx(y)
        assert amplitude_from_v(3, 2) == 0.5

    @given(st.floats(1e-3, 1e3), st.floats(1.0001, 1e3))
    def test_amplitude_inverts(self, v, u):
        d = amplitude_from_v(v, u)
        assert 0 < d < 1
        assert d * (1 + u) / (1 - d) == pytest.approx(v, rel=1e-9)


class TestEvolution:
    def test_golden(self):
        t = evolve_universe(GeodesicData("golden"), 12)
        assert all(e.k == 1 and e.n_cycles == 1 for e in t)
        assert all(e.u == pytest.approx(GOLDEN, rel=1e-14) for e in t)
        # the odd-digit permutation has order three
        assert [e.dominant_axis for e in t[:3]] != [t[0].dominant_axis] * 3
        assert axis_frequencies(t[:12]) == {"x": 1 / 3, "y": 1 / 3, "z": 1 / 3}

    def test_silver(self):
        t = evolve_universe(GeodesicData("sqrt2m1"), 8)
        assert all(e.k == 2 and e.u == pytest.approx(1 + math.sqrt(2)) for e in t)

    def test_single_era(self):
        f = axis_frequencies(evolve_universe(GeodesicData("golden"), 1))
        assert sorted(f.values()) == [0, 0, 1]

    def test_empty(self):
        with pytest.raises(DomainError):
            axis_frequencies([])

    def test_cusp_flag(self):
        t = evolve_universe(GeodesicData(Fraction(5, 19)), 10)
        assert t.cusp and t.digits == [3, 1, 4] and t[-1].degenerate
        assert t[-1].n_cycles == 3

    def test_truncated_prefix(self):
        t = evolve_universe(GeodesicData([3, 1, 2]), 5)
        assert t.truncated and [e.n_cycles for e in t] == [3, 1, 2]

    @given(surds(), st.integers(1, 25))
    def test_digits_match(self, x, n):
        t = evolve_universe(GeodesicData(x), n)
        want = oracles.mp_digits(lambda: (x.P + mpmath.sqrt(x.D)) / x.Q, n)
        assert t.digits == want

    @given(st.fractions(Fraction(1, 1000), Fraction(999, 1000), max_denominator=10**4))
    def test_literal_bkl_rules(self, x):
        assume(0 < x < 1)
        t = evolve_universe(GeodesicData(x), 50)
        assert [e.n_cycles for e in t] == oracles.bkl_eras(1 / x, 50)[: len(t)]

    @given(surds(), st.integers(1, 12), st.sampled_from(Coset.ORDER),
           st.floats(-50, -1.0001))
    def test_time_shift_equivalence(self, x, n, s, wminus):
        g = GeodesicData(x, wminus, s)
        full = evolve_universe(g, n + 1)
        shifted = evolve_universe(two_sided_shift(g), n)
        # the shifted universe starts from the identity labels; rename them
        rename = dict(zip("xyz", full[1].axes))
        for a, b in zip(full[1:], shifted):
            assert (a.u, a.k, a.v, a.delta, a.coset) == (b.u, b.k, b.v, b.delta, b.coset)
            assert a.axes == "".join(rename[c] for c in b.axes)
            assert [c.u for c in a.cycles] == [c.u for c in b.cycles]

    @given(surds(), st.sampled_from(Coset.ORDER), st.floats(-50, -1.0001))
    def test_inverse_shift(self, x, s, wminus):
        g = GeodesicData(x, wminus, s)
        h = inverse_two_sided_shift(two_sided_shift(g))
        assert h.omega_plus.value == x and h.s == g.s
        assert h.omega_minus == pytest.approx(wminus, rel=1e-12)

    def test_golden_two_sided_fixed(self):
        g = GeodesicData("golden", -GOLDEN, "1")
        h = two_sided_shift(g)
        assert h.omega_plus.value == g.omega_plus.value
        assert h.omega_minus == pytest.approx(-GOLDEN, rel=1e-15)
        assert h.s is coset_act(shift_matrix(1), Coset.ONE)

    def test_rational_shift_is_cusp(self):
        with pytest.raises(CuspError):
            two_sided_shift(GeodesicData(Fraction(2, 7)))

    @given(surds(), st.integers(1, 20))
    def test_permutation_matches_coset(self, x, n):
        t = evolve_universe(GeodesicData(x, -GOLDEN, "0"), n + 1)
        for a, b in zip(t, t[1:]):
            perm = dict(zip("xyz", axis_permutation(a.k)))
            # roles are named by the initial labels; the axis in role r moves to role perm(r)
            moved = [None] * 3
            for r, axis in enumerate(a.axes):
                moved["xyz".index(perm["xyz"[r]])] = axis
            assert b.axes == "".join(moved)
            assert b.coset == coset_act(shift_matrix(a.k), a.coset)

    def test_backward_eras(self):
        g = GeodesicData("sqrt2m1", -3.7, "0")
        t = evolve_universe(g, 3, backward=2)
        assert [e.n for e in t] == [-2, -1, 0, 1, 2]
        assert t.digits[2:] == [2, 2, 2]

    def test_y0_override(self):
        t = evolve_universe(GeodesicData("golden"), 3, y0=0.25)
        assert t[0].v == 4.0
        with pytest.raises(DomainError):
            evolve_universe(GeodesicData("golden"), 3, y0=-1)

    def test_omega_hook(self):
        t = evolve_universe(GeodesicData("golden"), 4, omega_hook=lambda o, x, y: o + 1,
                            omega0=0.0)
        assert [e.omega for e in t] == [0.0, 1.0, 2.0, 3.0]

    def test_serialization(self):
        t = evolve_universe(GeodesicData([3, 1, 2]), 3)
        js = t.to_json()
        assert [len(e["cycles"]) for e in js["eras"]] == [3, 1, 2]
        lines = t.to_csv().strip().splitlines()
        assert lines[0].startswith("era,cycle") and len(lines) == 1 + 6

    def test_bad_geodesic(self):
        with pytest.raises(DomainError):
            GeodesicData("golden", -0.5)
