from fractions import Fraction

import numpy as np
import pytest
import sympy

from Picard.binary_forms import (
    BinaryForm,
    Mat2,
    discriminant,
    discriminant_polynomial,
    equivariance_weight_check,
    evaluate_discriminant,
    gl2_action,
    random_rational,
    square_factor_form,
    sylvester_matrix,
    sylvester_resultant,
)
from Picard.errors import DegreeMismatch, DegreeTooSmall, SingularMatrix
from Picard.symbolic_core import Family, VarId, var, weighted_degree_check


def test_sylvester_resultant_examples():
    assert sylvester_resultant([1, -1], [1, -2]) == -1
    assert sylvester_resultant([1, -3, 2], [1, -3, 2]) == 0
    assert sylvester_resultant([1, 0, -1], [1, -1]) == 0


def test_sylvester_matches_sympy_resultant():
    xs = sympy.Symbol("x")
    f = [2, -3, 0, 5]
    g = [1, 4, -7]
    expected = sympy.resultant(sympy.Poly(f, xs), sympy.Poly(g, xs))
    assert sylvester_resultant(f, g) == Fraction(int(expected))


def test_sylvester_matrix_shape_and_degree_checks():
    rows = sylvester_matrix([1, 2, 3], [4, 5])
    assert len(rows) == 3 and all(len(row) == 3 for row in rows)
    assert sylvester_matrix([0, 1, 2], [1, 1], deg_f=1)[0] == [1, 2]
    with pytest.raises(DegreeMismatch):
        sylvester_matrix([1, 2], [1, 1], deg_f=3)
    with pytest.raises(DegreeMismatch):
        sylvester_matrix([1, 2, 3], [1, 1], deg_f=1)


def test_symbolic_quadratic_discriminant():
    a, b, c = (var(VarId.a(i)) for i in range(3))
    assert discriminant(BinaryForm.symbolic(2)) == 4 * a * c - b ** 2


def test_discriminant_of_power_vanishes():
    for m in (2, 3, 5):
        assert discriminant(BinaryForm([1] + [0] * m)) == 0


def test_discriminant_degree_too_small():
    with pytest.raises(DegreeTooSmall):
        discriminant(BinaryForm([1, 2]))


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_symbolic_discriminant_is_homogeneous(m):
    assert weighted_degree_check(discriminant_polynomial(m), {Family.A: 1}, 2 * (m - 1))


def test_symbolic_and_numeric_discriminants_agree():
    rng = np.random.default_rng(5)
    for m in (3, 4, 6):
        form = BinaryForm.random(rng, m, height=20)
        assert evaluate_discriminant(form, symbolic=True) == evaluate_discriminant(form)


def test_gl2_action_examples():
    form = BinaryForm([1, 2, 3, 4])
    assert gl2_action(Mat2.identity(), form) == form
    assert gl2_action(Mat2.diag(2, 2), form) == form.scaled(Fraction(1, 8))
    assert gl2_action(Mat2.swap(), form) == BinaryForm([4, 3, 2, 1])


def test_gl2_action_singular_matrix():
    with pytest.raises(SingularMatrix):
        gl2_action(Mat2(1, 2, 2, 4), BinaryForm([1, 0, 1]))


def test_gl2_action_is_a_left_action():
    rng = np.random.default_rng(9)
    for _ in range(10):
        form = BinaryForm.random(rng, 4, height=10)
        a, b = Mat2.random(rng), Mat2.random(rng)
        assert gl2_action(a @ b, form) == gl2_action(a, gl2_action(b, form))


def test_equivariance_examples():
    form = BinaryForm([1, 0, 1])
    assert discriminant(form) == 4
    assert equivariance_weight_check(form, Mat2.identity())
    assert equivariance_weight_check(form, Mat2.diag(2, 3))
    assert discriminant(gl2_action(Mat2.diag(2, 3), form)) == Fraction(1, 9)


@pytest.mark.parametrize("m", [4, 6])
def test_equivariance_on_random_forms(m):
    rng = np.random.default_rng(m)
    for _ in range(10):
        form = BinaryForm.random(rng, m)
        for _ in range(10):
            assert equivariance_weight_check(form, Mat2.random(rng))


def test_square_factor_forms_have_zero_discriminant():
    rng = np.random.default_rng(21)
    for _ in range(20):
        alpha = random_rational(rng, 50, nonzero=True)
        beta = random_rational(rng, 50)
        cofactor = BinaryForm.random(rng, 3, height=30)
        assert discriminant(square_factor_form(alpha, beta, cofactor)) == 0


def test_parse_accepts_fractions():
    form = BinaryForm.parse("1, -1/2, 3")
    assert form.degree == 2
    assert form.coefficient_texts() == ["1", "-1/2", "3"]
    with pytest.raises(ValueError):
        BinaryForm.parse("1,,2")
    with pytest.raises(ValueError, match="zero denominator"):
        BinaryForm.parse("1/0,1,1")


def test_mat2_inverse():
    matrix = Mat2(2, 1, 1, 1)
    assert matrix @ matrix.inverse() == Mat2.identity()
    with pytest.raises(SingularMatrix):
        Mat2(1, 1, 1, 1).inverse()
