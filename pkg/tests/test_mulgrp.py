import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nrscan.intlin import IntLattice, left_kernel, torsion_order_of_quotient
from nrscan.mulgrp import (
    ONE,
    BadReduction,
    FactoredRational,
    evaluate_relation,
    exponent_matrix,
    factor_rational,
    mult_order_mod_p,
    relation_lattice,
    torus_report,
)
from nrscan.primes import primes_in_range

fr = factor_rational


def brute_relations(tup, bound):
    return {v for v in itertools.product(range(-bound, bound + 1), repeat=len(tup)) if evaluate_relation(tup, v) == ONE}


def naive_order(a, p):
    a %= p
    t, x = 1, a
    while x != 1:
        x = x * a % p
        t += 1
    return t


def test_factor_rational_examples():
    assert fr(-4, 1) == FactoredRational(1, ((2, 2),))
    assert fr(2, 3) == FactoredRational(0, ((2, 1), (3, -1)))
    assert fr(1, 1) == FactoredRational(0, ())
    assert fr(6, -4).to_fraction() == Fraction(-3, 2)
    with pytest.raises(ValueError):
        fr(0, 1)
    with pytest.raises(ValueError):
        fr(1, 0)


@given(st.integers(-10**6, 10**6).filter(bool), st.integers(1, 10**6))
def test_factor_rational_round_trip(n, d):
    assert fr(n, d).to_fraction() == Fraction(n, d)


def test_relation_lattice_examples():
    assert relation_lattice([fr(-4), fr(2)]) == IntLattice.from_generators([[2, -4]])
    assert relation_lattice([fr(4), fr(2)]) == IntLattice.from_generators([[1, -2]])
    assert relation_lattice([fr(2), fr(3)]) == IntLattice.zero(2)


def test_relation_lattice_minus4_2_brute_force():
    tup = [fr(-4), fr(2)]
    brute = brute_relations(tup, 10)
    assert brute == {(a, -2 * a) for a in range(-4, 5, 2)}
    L = relation_lattice(tup)
    for v in itertools.product(range(-10, 11), repeat=2):
        assert L.contains(v) == (v in brute)


def test_torus_report_examples():
    r = torus_report([fr(-4), fr(2)])
    assert (r.dimension, r.n_components, r.independent, r.torsion) == (1, 2, False, False)
    r = torus_report([fr(2)])
    assert (r.dimension, r.n_components, r.independent) == (1, 1, True)
    r = torus_report([fr(-1)])
    assert r.torsion and r.dimension == 0
    # {+-1} x G_m has two components
    assert torus_report([fr(-1), fr(2)]).n_components == 2


def test_mult_order_examples():
    assert mult_order_mod_p(fr(2), 7) == 3
    assert mult_order_mod_p(fr(-4), 5) == 1
    assert mult_order_mod_p(fr(1), 101) == 1
    assert mult_order_mod_p(fr(2, 3), 5) == naive_order(2 * pow(3, -1, 5), 5)
    with pytest.raises(BadReduction):
        mult_order_mod_p(fr(6), 3)


coords = st.lists(
    st.tuples(st.integers(0, 1), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=3
)


def _tuple(c):
    return [FactoredRational.from_map(s, {2: a, 3: b, 5: e}) for s, a, b, e in c]


@given(coords)
def test_relations_hold_exactly(c):
    tup = _tuple(c)
    for v in relation_lattice(tup).vectors():
        assert evaluate_relation(tup, v) == ONE


@given(coords)
def test_relations_index_one_or_two_in_exponent_kernel(c):
    tup = _tuple(c)
    L = relation_lattice(tup)
    K0 = left_kernel(exponent_matrix(tup))
    assert L.rank == K0.rank
    assert all(K0.contains(v) for v in L.vectors())
    assert torsion_order_of_quotient(L) // torsion_order_of_quotient(K0) in (1, 2)


@given(coords)
def test_report_invariants(c):
    tup = _tuple(c)
    r = torus_report(tup)
    assert r.dimension == len(tup) - r.relation_lattice.rank
    if r.independent:
        assert r.n_components == 1 and r.dimension == len(tup)
    if r.torsion:
        assert r.dimension == 0
    if len(tup) == 1 and not r.torsion:
        assert r.n_components == 1


def test_order_properties_on_primes():
    ps = primes_in_range(7, 3000)
    for x in (2, -3, Fraction(5, 7), -12, Fraction(-9, 2)):
        r = fr(x.numerator, x.denominator) if isinstance(x, Fraction) else fr(x)
        for p in ps:
            if p in r.support:
                continue
            t = mult_order_mod_p(r, p)
            assert (p - 1) % t == 0
            assert t == naive_order(r.numerator() * pow(r.denominator(), -1, p), p)
            assert mult_order_mod_p(r**2, p) == t // (2 if t % 2 == 0 else 1)
