"""Cartan data, the invariant form, roots and the weight order."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from blocko import rootdata
from blocko.errors import CartanError
from blocko.rootdata import (
    Root,
    Weight,
    build_root_system,
    cartan_datum,
    cartan_from_json,
    cartan_to_json,
    coroot_pairing,
    form,
    leq,
    reflect,
    reflect_root,
    rho,
    simple_root,
    weight_from_json,
    weight_to_json,
)

from conftest import A1_AFFINE, A2, B2, weight

rationals = st.fractions(
    max_denominator=6, min_value=Fraction(-5), max_value=Fraction(5)
)


def a2_weights(draw_coords):
    cartan = cartan_datum(A2)
    return Weight(cartan, tuple(draw_coords))


def test_kind_detection():
    assert cartan_datum([[2]]).kind == "finite"
    assert cartan_datum(A2).kind == "finite"
    assert cartan_datum(B2).kind == "finite"
    assert cartan_datum(A1_AFFINE).kind == "affine"
    assert cartan_datum([[2, -3], [-3, 2]]).kind == "indefinite"


def test_bad_gcm_rejected():
    with pytest.raises(CartanError):
        cartan_datum([[2, -1], [0, 2]])  # zero pattern not symmetric
    with pytest.raises(CartanError):
        cartan_datum([[1]])
    with pytest.raises(CartanError):
        cartan_datum(B2, symmetrizer=[1, 1])


def test_b2_symmetrizer():
    cartan = cartan_datum(B2)
    d = cartan.symmetrizer
    for i in range(2):
        for j in range(2):
            assert d[i] * cartan.matrix[i][j] == d[j] * cartan.matrix[j][i]


@given(st.lists(rationals, min_size=2, max_size=2),
       st.lists(rationals, min_size=2, max_size=2))
def test_form_symmetric(xs, ys):
    cartan = cartan_datum(A2)
    x = Weight(cartan, tuple(xs))
    y = Weight(cartan, tuple(ys))
    assert form(x, y) == form(y, x)


@given(st.lists(rationals, min_size=2, max_size=2))
def test_reflect_involution(xs):
    cartan = cartan_datum(B2)
    x = Weight(cartan, tuple(xs))
    for i in range(2):
        beta = simple_root(cartan, i)
        assert reflect(beta, reflect(beta, x)) == x


def test_symmetrizer_rescaling_changes_form_not_integrality():
    # the form scales, coroot pairings do not
    a = cartan_datum(A2)
    b = cartan_datum(A2, symmetrizer=[3, 3])
    for i in range(2):
        for j in range(2):
            assert coroot_pairing(
                simple_root(a, j), simple_root(a, i)
            ) == coroot_pairing(simple_root(b, j), simple_root(b, i))
    assert form(simple_root(b, 0), simple_root(b, 0)) == 3 * form(
        simple_root(a, 0), simple_root(a, 0)
    )


def test_rho_pairings_are_one():
    for matrix in (A2, B2):
        cartan = cartan_datum(matrix)
        r = rho(cartan)
        for i in range(cartan.rank):
            assert coroot_pairing(r, simple_root(cartan, i)) == 1


def test_positive_root_counts():
    assert len(build_root_system(cartan_datum(A2), 10).positive_roots) == 3
    assert len(build_root_system(cartan_datum(B2), 10).positive_roots) == 4


def test_affine_root_system_has_imaginary_layer():
    cartan = cartan_datum(A1_AFFINE)
    system = build_root_system(cartan, 8)
    imaginary = [r for r in system.positive_roots if not r.is_real]
    assert imaginary
    delta = Root(cartan, cartan.marks)
    assert all(form(r, r) == 0 for r in imaginary)
    assert imaginary[0].simple_coords == delta.simple_coords


def test_reflect_root_permutes_positives_minus_alpha():
    cartan = cartan_datum(B2)
    system = build_root_system(cartan, 10)
    for i in range(2):
        alpha = simple_root(cartan, i)
        others = [
            r
            for r in system.positive_roots
            if r.simple_coords != alpha.simple_coords
        ]
        images = [reflect_root(alpha, r) for r in others]
        assert all(r.sign > 0 for r in images)


def test_leq_is_a_partial_order_on_samples():
    cartan = cartan_datum(A2)
    pts = [weight(cartan, a, b) for a in (-2, 0, 1) for b in (-1, 0, 2)]
    for x in pts:
        assert leq(x, x)
        for y in pts:
            if leq(x, y) and leq(y, x):
                assert x == y
            for z in pts:
                if leq(x, y) and leq(y, z):
                    assert leq(x, z)


def test_leq_requires_integral_difference():
    cartan = cartan_datum(A2)
    assert not leq(weight(cartan, 0, 0), weight(cartan, "1/2", 0))


def test_weight_json_round_trip():
    cartan = cartan_datum(A1_AFFINE)
    w = Weight(cartan, (Fraction(1, 2), Fraction(-3)), Fraction(2, 5))
    again = weight_from_json(weight_to_json(w), cartan)
    assert again == w


def test_cartan_json_round_trip():
    cartan = cartan_datum(B2)
    again = cartan_from_json(cartan_to_json(cartan))
    assert again.matrix == cartan.matrix
    assert again.symmetrizer == cartan.symmetrizer
