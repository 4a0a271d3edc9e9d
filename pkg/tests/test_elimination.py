import time
from fractions import Fraction
from math import prod

import numpy as np
import pytest
import sympy

from Picard.binary_forms import BinaryForm, random_rational
from Picard.elimination import (
    ConstrainedPoint,
    FarPoint,
    apply_g,
    apply_h,
    build_elimination,
    delta_weight_holds,
    equivariance_check,
    lambda_tilde_failures,
    sample_far_point,
    solve_by_linear_system,
    verify_parametrisation,
)
from Picard.errors import ConstraintViolated, InvalidParams, OutOfRange
from Picard.symbolic_core import Family, MultiPoly, VarId, var, weighted_degree_check

GRID = [(r, d, n) for r, d in ((2, 3), (2, 4), (3, 2)) for n in range(3, r * d + 2)]


def test_base_case_phi():
    data = build_elimination(2, 3, 3)
    expected = MultiPoly.parse("s_3^2 - s_2^2 - a_1 - a_2 - a_3 - a_4 - s_1^2")
    assert len(data.phi) == 1
    assert data.phi_of(0) == expected
    assert data.lambda_of(0) == 1


def test_first_inductive_lambda():
    data = build_elimination(2, 3, 4)
    p1 = var(VarId.p(1))
    assert data.lambda_of(1) == p1 ** 4 * (1 - p1)
    assert data.lambda_tilde_of(1) == 1 - p1


def test_parameter_errors():
    with pytest.raises(OutOfRange):
        build_elimination(2, 3, 2)
    with pytest.raises(OutOfRange):
        build_elimination(2, 3, 8)
    with pytest.raises(InvalidParams):
        build_elimination(1, 3, 3)


@pytest.mark.parametrize("r,d,n", GRID)
def test_parametrisation_structure(r, d, n):
    data = build_elimination(r, d, n)
    weights = {Family.A: r, Family.S: 1, Family.T: 1, Family.P: 0}
    assert len(data.phi) == n - 2
    assert data.lambda_of(0) == 1
    for phi in data.phi:
        assert weighted_degree_check(phi.numerator, weights, r)
        assert all(factor.involves_only(Family.P) for factor, _ in phi.denominator_factors)
    for i in range(1, n - 2):
        assert lambda_tilde_failures(data, i) == []


@pytest.mark.parametrize("r,d,n", GRID)
def test_round_trip_and_oracle(r, d, n):
    data = build_elimination(r, d, n)
    rng = np.random.default_rng(1000 * r + 10 * d + n)
    for _ in range(20):
        pt = sample_far_point(data, rng)
        cp = apply_g(data, pt)
        assert cp.violations(r) == []
        assert apply_h(data, cp) == pt
        assert list(cp.form.coefficients) == solve_by_linear_system(data, pt)


def test_base_case_point():
    data = build_elimination(2, 3, 3)
    cp = apply_g(data, FarPoint((0, 0, 0, 0), (), (1, 1, 1), ()))
    assert cp.form == BinaryForm([1, 0, 0, 0, 0, -1, 1])


def test_no_free_coefficients_at_maximal_n():
    data = build_elimination(2, 3, 7)
    assert data.free_count == 0
    cp = apply_g(data, FarPoint((), (2, 3, 4, 5), (1, 1, 1), (1, 1, 1, 1)))
    xs = sympy.Symbol("x")
    expected = sympy.Poly(1 + prod(xs - k for k in range(6)), xs).all_coeffs()[::-1]
    assert list(cp.form.coefficients) == [Fraction(int(c)) for c in expected]
    assert cp.violations(2) == []


def test_projection_from_r3():
    data = build_elimination(3, 2, 3)
    rng = np.random.default_rng(2)
    pt = sample_far_point(data, rng)
    back = apply_h(data, apply_g(data, pt))
    assert len(back.a_coeffs) == 4
    assert back == pt


def test_apply_h_rejects_violations():
    data = build_elimination(2, 3, 3)
    cp = apply_g(data, FarPoint((1, 2, 3, 4), (), (1, 2, 3), ()))
    coefficients = list(cp.form.coefficients)
    coefficients[1] += 1
    broken = ConstrainedPoint(BinaryForm(coefficients), (), cp.s_values, ())
    with pytest.raises(ConstraintViolated):
        apply_h(data, broken)


def test_far_point_rejects_forbidden_p():
    with pytest.raises(ConstraintViolated):
        FarPoint((), (2, 2), (1, 1, 1), (1, 1))
    with pytest.raises(ConstraintViolated):
        FarPoint((), (1,), (1, 1, 1), (1,))


@pytest.mark.parametrize("r,d,n", [(2, 3, 5), (3, 2, 4)])
def test_equivariance(r, d, n):
    data = build_elimination(r, d, n)
    rng = np.random.default_rng(17)
    for _ in range(5):
        pt = sample_far_point(data, rng)
        assert equivariance_check(data, pt, random_rational(rng, 20, nonzero=True))


@pytest.mark.parametrize("r,d,n", [(r, d, n) for r, d in ((2, 3), (3, 2)) for n in range(3, r * d + 2)])
def test_delta_weight(r, d, n):
    data = build_elimination(r, d, n)
    rng = np.random.default_rng(n)
    for _ in range(10):
        pt = sample_far_point(data, rng)
        for _ in range(5):
            assert delta_weight_holds(data, pt, random_rational(rng, 10, nonzero=True))


def test_verify_parametrisation_report():
    report = verify_parametrisation(build_elimination(2, 3, 5), trials=20, seed=42)
    assert report.passed
    assert report.render().splitlines()[-1] == "ALL CHECKS PASSED"
    assert "lambda_tilde" in [check.name for check in report.checks]


def test_verify_parametrisation_at_maximal_n():
    data = build_elimination(3, 2, 7)
    assert len(data.phi) == 5
    assert data.free_count == 0
    assert len(data.lambda_tilde) == 4
    assert verify_parametrisation(data, trials=5, seed=0).passed


def test_psi_is_phi_times_lambda():
    data = build_elimination(2, 3, 6)
    for i in range(data.n - 2):
        assert data.psi_of(i) == data.phi_of(i) * data.lambda_of(i)


@pytest.mark.parametrize("r,d,n", [(2, 3, 6), (3, 2, 5)])
def test_linear_forms_match_assembled_phi(r, d, n):
    data = build_elimination(r, d, n)
    rng = np.random.default_rng(3)
    for _ in range(3):
        assignment = sample_far_point(data, rng).assignment()
        for i in range(n - 2):
            assert data.phi_value(i, assignment) == data.phi_of(i).evaluate(assignment)
            assert data.psi_value(i, assignment) == data.psi_of(i).evaluate(assignment)


def test_largest_grid_point_builds_in_budget():
    start = time.perf_counter()
    data = build_elimination(2, 4, 9)
    assert data.free_count == 0
    rng = np.random.default_rng(9)
    for _ in range(20):
        pt = sample_far_point(data, rng)
        assert apply_h(data, apply_g(data, pt)) == pt
    assert time.perf_counter() - start < 60
