"""The truncated composition-operator matrix and its truncation degree."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from schroeder.compop import (
    UnsupportedSpectrumError,
    build,
    eigenvalue_products,
    jet_vector,
    truncation_degree,
    vector_jet,
)
from schroeder.linalg import ExactMatrix, mat_vec
from schroeder.maps import PolyMap, compose, pad_map
from schroeder.scalars import I, Scalar
from schroeder.series import Jet, monomial_count

from conftest import NONRESONANT_POOL, jet_of, random_poly_map, sc


def test_spectrum_rejections():
    with pytest.raises(UnsupportedSpectrumError):
        truncation_degree([sc(1, 2), sc(0)])
    with pytest.raises(UnsupportedSpectrumError):
        truncation_degree([sc(1, 2), sc(1)])
    with pytest.raises(UnsupportedSpectrumError):
        truncation_degree([sc(3, 2)])


def test_truncation_degree_cases():
    assert truncation_degree([sc(1, 2), sc(1, 3)]) == 1
    assert truncation_degree([sc(1, 2), sc(1, 4)]) == 2
    assert truncation_degree([sc(1, 2), sc(1, 4), sc(1, 4), sc(1, 8)]) == 3
    assert truncation_degree([sc(1, 2), sc(1, 8)]) == 3
    assert truncation_degree([sc(1, 2)]) == 1
    assert truncation_degree([Scalar.of(0, Fraction(1, 2))]) == 1
    assert truncation_degree(list(NONRESONANT_POOL)) == 1


def test_truncation_degree_with_signs_and_complex_entries():
    assert truncation_degree([sc(-1, 2), sc(1, 4)]) == 2
    assert truncation_degree([Scalar.of(0, Fraction(1, 2)), sc(-1, 4)]) == 2
    assert truncation_degree([sc(1, 2), sc(-1, 2)]) == 1


def test_eigenvalue_products_order_and_values():
    prods = dict(eigenvalue_products([sc(1, 2), sc(1, 4)], 2, 2))
    assert prods[(2, 0)] == sc(1, 4)
    assert prods[(1, 1)] == sc(1, 8)
    assert prods[(0, 2)] == sc(1, 16)


def test_build_rejects_bad_maps():
    lower = PolyMap(
        (
            jet_of(2, 2, [((1, 0), sc(1, 2))]),
            jet_of(2, 2, [((1, 0), sc(1)), ((0, 1), sc(1, 3))]),
        )
    )
    with pytest.raises(ValueError):
        build(lower)


def test_operator_shape_and_diagonal(obstructed_map):
    op = build(obstructed_map)
    assert op.degree == 2
    assert op.size == monomial_count(2, 2) == 5
    assert op.basis == ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert op.diagonal() == (
        sc(1, 2),
        sc(1, 4),
        sc(1, 4),
        sc(1, 8),
        sc(1, 16),
    )
    assert op.matrix.is_lower_triangular()
    assert op.matrix.corner(2) == obstructed_map.linear_part().transpose()


def test_operator_entries_quadratic_coupling(obstructed_map):
    op = build(obstructed_map)
    row = op.index[(2, 0)]
    col = op.index[(0, 1)]
    assert op.matrix.at(row, col) == sc(1, 16)
    dense = [
        [sc(1, 2), 0, 0, 0, 0],
        [0, sc(1, 4), 0, 0, 0],
        [0, sc(1, 16), sc(1, 4), 0, 0],
        [0, 0, 0, sc(1, 8), 0],
        [0, 0, 0, 0, sc(1, 16)],
    ]
    expect = ExactMatrix.from_rows(
        [[x if isinstance(x, Scalar) else sc(0) for x in r] for r in dense]
    )
    assert op.matrix == expect


def test_operator_entries_four_variable_coupling(coupled_map):
    op = build(coupled_map)
    assert op.degree == 3
    assert op.size == monomial_count(4, 3) == 34
    e2 = (0, 1, 0, 0)
    z1sq = (2, 0, 0, 0)
    z3 = (0, 0, 1, 0)
    z1z3 = (1, 0, 1, 0)
    z1z2 = (1, 1, 0, 0)
    assert op.matrix.at(op.index[z1sq], op.index[e2]) == sc(1, 8)
    assert op.matrix.at(op.index[z3], op.index[e2]) == sc(1, 8)
    assert op.matrix.at(op.index[z1z3], op.index[z1z2]) == sc(1, 16)
    assert op.matrix.at(op.index[z1z3], op.index[z1z3]) == sc(1, 8)
    assert op.matrix.corner(4) == coupled_map.linear_part().transpose()


def test_operator_diagonal_law():
    rng = random.Random(53)
    diag = [sc(1, 2), sc(1, 4)]
    phi = random_poly_map(rng, 2, diag, 3)
    op = build(phi, 3)
    for alpha in op.basis:
        expect = diag[0] ** alpha[0] * diag[1] ** alpha[1]
        assert op.matrix.at(op.index[alpha], op.index[alpha]) == expect


def test_operator_action_is_composition():
    rng = random.Random(59)
    for _ in range(8):
        diag = [rng.choice(NONRESONANT_POOL) for _ in range(2)]
        phi = random_poly_map(rng, 2, diag, 4)
        op = build(phi, 4)
        f = Jet.build(
            2,
            4,
            [
                (alpha, sc(rng.randint(-3, 3), rng.choice([1, 2, 3])))
                for alpha in op.basis
            ],
        )
        via_matrix = vector_jet(op, mat_vec(op.matrix, jet_vector(op, f)))
        direct = compose(f, pad_map(op.source, 4))
        assert via_matrix == direct


def test_vector_jet_round_trip(diagonal_map):
    op = build(diagonal_map, 3)
    f = jet_of(2, 3, [((1, 0), sc(2)), ((1, 1), I), ((0, 3), sc(-1, 7))])
    assert vector_jet(op, jet_vector(op, f)) == f
    with pytest.raises(ValueError):
        vector_jet(op, (sc(1),))


def test_build_degree_override(diagonal_map):
    phi = PolyMap(
        (
            jet_of(2, 1, [((1, 0), sc(1, 2))]),
            jet_of(2, 1, [((0, 1), sc(1, 3))]),
        )
    )
    op = build(phi, 4)
    assert op.degree == 4
    with pytest.raises(ValueError):
        build(diagonal_map, 1)
