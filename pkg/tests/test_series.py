"""Monomial ordering and truncated power-series (jet) arithmetic."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schroeder.scalars import ONE, ZERO, Scalar
from schroeder.series import (
    Jet,
    compare_monomials,
    enumerate_monomials,
    grad0,
    monomial_count,
    monomials_of_degree,
    order_key,
    unit_index,
)

from conftest import sc


def test_order_two_variables():
    assert enumerate_monomials(2, 3) == [
        (1, 0),
        (0, 1),
        (2, 0),
        (1, 1),
        (0, 2),
        (3, 0),
        (2, 1),
        (1, 2),
        (0, 3),
    ]


def test_order_three_variables_degree_two():
    assert monomials_of_degree(3, 2) == [
        (2, 0, 0),
        (1, 1, 0),
        (1, 0, 1),
        (0, 2, 0),
        (0, 1, 1),
        (0, 0, 2),
    ]


def test_order_is_graded_then_first_difference():
    assert compare_monomials((0, 2), (3, 0)) == -1
    assert compare_monomials((2, 1), (1, 2)) == -1
    assert compare_monomials((1, 1), (1, 1)) == 0
    assert compare_monomials((0, 3), (2, 1)) == 1
    with pytest.raises(ValueError):
        compare_monomials((1, 0), (1, 0, 0))


def test_enumeration_count_and_sortedness():
    for n in (1, 2, 3, 4):
        for k in (1, 2, 3, 4):
            mons = enumerate_monomials(n, k)
            assert len(mons) == monomial_count(n, k)
            assert len(set(mons)) == len(mons)
            assert mons == sorted(mons, key=order_key)
            assert all(1 <= sum(a) <= k for a in mons)


def test_unit_index():
    assert unit_index(3, 1) == (0, 1, 0)
    assert enumerate_monomials(3, 1) == [unit_index(3, i) for i in range(3)]


def test_build_canonicalizes():
    f = Jet.build(
        2,
        2,
        [
            ((1, 0), sc(1, 2)),
            ((1, 0), sc(-1, 2)),
            ((0, 1), ZERO),
            ((3, 0), ONE),
            ((1, 1), sc(5)),
        ],
    )
    assert f.coeffs == {(1, 1): sc(5)}
    assert f == Jet.monomial(2, 2, (1, 1), sc(5))


def test_build_rejects_bad_exponents():
    with pytest.raises(ValueError):
        Jet.build(2, 3, [((1, 0, 0), ONE)])
    with pytest.raises(ValueError):
        Jet.build(2, 3, [((-1, 2), ONE)])


def test_terms_sorted_and_constant_first():
    f = Jet.build(2, 2, [((0, 2), ONE), ((0, 0), sc(7)), ((1, 0), sc(2))])
    assert [a for a, _ in f.terms()] == [(0, 0), (1, 0), (0, 2)]
    assert f.constant_term() == sc(7)


small_fracs = st.fractions(min_value=-3, max_value=3, max_denominator=4)
small_scalars = st.builds(Scalar, small_fracs, small_fracs)


def jets(dim: int, degree: int):
    mons = [((0,) * dim)] + enumerate_monomials(dim, degree)
    return st.lists(
        st.tuples(st.sampled_from(mons), small_scalars), max_size=6
    ).map(lambda ts: Jet.build(dim, degree, ts))


@settings(max_examples=40, deadline=None)
@given(jets(2, 3), jets(2, 3), jets(2, 3))
def test_jet_ring_laws(f, g, h):
    assert f + g == g + f
    assert (f + g) + h == f + (g + h)
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == Jet.zero(2, 3)


@settings(max_examples=40, deadline=None)
@given(jets(2, 3))
def test_slice_partition(f):
    total = Jet.zero(2, 3)
    for d in range(0, 4):
        part = f.homogeneous_slice(d)
        assert all(sum(a) == d for a in part.coeffs)
        total = total + part
    assert total == f


def test_truncate_drops_and_raises_degree():
    f = Jet.build(2, 3, [((1, 0), ONE), ((2, 1), sc(4))])
    low = f.truncate(1)
    assert low.degree == 1 and low.coeffs == {(1, 0): ONE}
    high = low.truncate(5)
    assert high.degree == 5 and high.coefficient((1, 0)) == ONE


def test_mul_truncates_to_smaller_degree():
    f = Jet.monomial(2, 4, (2, 0))
    g = Jet.monomial(2, 2, (0, 2))
    assert (f * g).degree == 2
    assert (f * g).is_zero()
    h = Jet.monomial(2, 4, (0, 2))
    assert (f * h).coefficient((2, 2)) == ONE


def test_grad0_reads_linear_row():
    f = Jet.build(2, 2, [((1, 0), sc(3)), ((0, 1), sc(1, 2)), ((2, 0), ONE)])
    assert grad0(f) == (sc(3), sc(1, 2))


def test_scale():
    f = Jet.build(2, 2, [((1, 0), sc(3)), ((0, 2), sc(-1))])
    assert f.scale(sc(1, 3)).coefficient((1, 0)) == ONE
    assert f.scale(ZERO).is_zero()


def test_random_mul_against_dense_reference():
    rng = random.Random(7)
    for _ in range(20):
        deg = 4
        f = Jet.build(
            2,
            deg,
            [
                (a, Scalar.of(Fraction(rng.randint(-2, 2), rng.choice([1, 2]))))
                for a in enumerate_monomials(2, deg)
            ],
        )
        g = Jet.build(
            2,
            deg,
            [
                (a, Scalar.of(Fraction(rng.randint(-2, 2), rng.choice([1, 2]))))
                for a in enumerate_monomials(2, deg)
            ],
        )
        prod = f * g
        for gamma in enumerate_monomials(2, deg):
            expect = ZERO
            for a in list(f.coeffs):
                b = tuple(x - y for x, y in zip(gamma, a))
                if all(e >= 0 for e in b):
                    expect = expect + f.coefficient(a) * g.coefficient(b)
            assert prod.coefficient(gamma) == expect
