"""Birational parametrisation of constrained binary forms by their free coefficients.

For 3 <= n <= rd+1 a degree-rd form f with f(0,1) = s_1^r, f(1,0) = s_2^r,
f(1,1) = s_3^r and f(1,p_i) = t_i^r is determined by a_1..a_{rd+1-n} and the
point data.  The remaining coefficients a_{rd-1-i} = phi_i are rational
functions whose denominators only involve the p variables.  They are built by
induction on n: each step solves the new condition t^r = f(1, p) for one more
coefficient, which occurs linearly, and substitutes the solution back into
the earlier phi's.

Every phi_i is linear in the sources s_j^r, t_m^r and a_j with coefficients
in the p variables alone, so the induction carries that linear form and the
full numerators are only assembled on request.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
import sympy

from Picard.binary_forms import BinaryForm, evaluate_discriminant, random_rational
from Picard.config import Config
from Picard.errors import (
    ConstraintViolated,
    DegreeMismatch,
    DenominatorVanished,
    InternalInconsistency,
    InvalidParams,
    NonLinearOccurrence,
    OutOfRange,
)
from Picard.observability import Observability
from Picard.reports import VerificationReport
from Picard.symbolic_core import (
    FactoredRational,
    Family,
    MultiPoly,
    VarId,
    var,
    weighted_degree_check,
)

# source polynomial (s_j^r, t_m^r or a_j) -> coefficient in the p variables
LinearForm = Dict[MultiPoly, FactoredRational]


def _assemble(form: LinearForm) -> FactoredRational:
    return FactoredRational.combine((coeff, source) for source, coeff in form.items())


def _evaluate_form(form: LinearForm, assignment: Mapping[VarId, Fraction]) -> Fraction:
    total = Fraction(0)
    for source, coeff in form.items():
        total += coeff.evaluate(assignment) * source.evaluate(assignment)
    return total


def _sum(coeffs: Iterable[FactoredRational]) -> FactoredRational:
    return FactoredRational.combine((coeff, 1) for coeff in coeffs).normalized()


def _collect(collected: Mapping[MultiPoly, List[FactoredRational]]) -> LinearForm:
    out: LinearForm = {}
    for source, coeffs in collected.items():
        total = _sum(coeffs)
        if not total.is_zero():
            out[source] = total
    return out


def _scaled(form: LinearForm, factor: FactoredRational) -> LinearForm:
    return {source: (coeff * factor).normalized() for source, coeff in form.items()}


@dataclass(frozen=True, eq=False)
class EliminationData:
    r: int
    d: int
    n: int
    phi_forms: Tuple[LinearForm, ...]
    psi_forms: Tuple[LinearForm, ...]
    lambdas: Tuple[FactoredRational, ...]
    # normalised lambda-tilde for steps n-3 down to 1
    lambda_tilde: Tuple[FactoredRational, ...] = ()

    @property
    def rd(self) -> int:
        return self.r * self.d

    @property
    def free_count(self) -> int:
        """Number of free a-coefficients a_1..a_{rd+1-n}."""
        return self.rd + 1 - self.n

    @cached_property
    def phi(self) -> Tuple[FactoredRational, ...]:
        return tuple(_assemble(form) for form in self.phi_forms)

    @cached_property
    def psi(self) -> Tuple[FactoredRational, ...]:
        return tuple(_assemble(form) for form in self.psi_forms)

    def _position(self, i: int) -> int:
        if not 0 <= i <= self.n - 3:
            raise OutOfRange(f"index {i} outside 0..{self.n - 3}")
        return self.n - 3 - i

    def phi_of(self, i: int) -> FactoredRational:
        return self.phi[self._position(i)]

    def lambda_of(self, i: int) -> FactoredRational:
        return self.lambdas[self._position(i)]

    def psi_of(self, i: int) -> FactoredRational:
        return self.psi[self._position(i)]

    def phi_value(self, i: int, assignment: Mapping[VarId, Fraction]) -> Fraction:
        return _evaluate_form(self.phi_forms[self._position(i)], assignment)

    def psi_value(self, i: int, assignment: Mapping[VarId, Fraction]) -> Fraction:
        return _evaluate_form(self.psi_forms[self._position(i)], assignment)

    def lambda_tilde_of(self, i: int) -> FactoredRational:
        if not 1 <= i <= self.n - 3:
            raise OutOfRange(f"lambda-tilde is defined for 1..{self.n - 3}, got {i}")
        return self.lambda_tilde[self.n - 3 - i]

    def coefficient_functions(self) -> List[FactoredRational]:
        """c_0..c_rd of g_n: (s_2^r, a_1, ..., a_{rd+1-n}, phi_{n-3}, ..., phi_0, s_1^r)."""
        s1, s2 = (var(VarId.s(i)) ** self.r for i in (1, 2))
        frees = [FactoredRational(var(VarId.a(j))) for j in range(1, self.free_count + 1)]
        return [FactoredRational(s2)] + frees + list(self.phi) + [FactoredRational(s1)]

    def coefficient_values(self, assignment: Mapping[VarId, Fraction]) -> List[Fraction]:
        """The coefficient functions evaluated at a point, phi by phi through its linear form."""
        s1, s2 = (Fraction(assignment[VarId.s(i)]) ** self.r for i in (1, 2))
        frees = [Fraction(assignment[VarId.a(j)]) for j in range(1, self.free_count + 1)]
        return [s2] + frees + [_evaluate_form(form, assignment) for form in self.phi_forms] + [s1]

    def denominator_factors(self) -> List[MultiPoly]:
        seen: Dict[MultiPoly, None] = {}
        coeffs = [c for form in self.phi_forms + self.psi_forms for c in form.values()]
        for item in list(self.lambdas) + coeffs:
            for factor, _ in item.denominator_factors:
                seen.setdefault(factor, None)
        return list(seen)


def _check_params(r: int, d: int, n: int):
    if r < 2:
        raise InvalidParams(f"r must be at least 2, got {r}")
    if d < 1:
        raise InvalidParams(f"d must be at least 1, got {d}")
    if n < 3 or n > r * d + 1:
        raise OutOfRange(f"elimination needs 3 <= n <= rd+1 = {r * d + 1}, got n={n}")


def build_elimination(r: int, d: int, n: int) -> EliminationData:
    _check_params(r, d, n)
    return _build(r, d, n)


@lru_cache(maxsize=None)
def _build(r: int, d: int, n: int) -> EliminationData:
    if n == 3:
        data = _base_case(r, d)
    else:
        data = _inductive_step(_build(r, d, n - 1), n)
    Observability.log_step(
        "build_elimination",
        {"r": r, "d": d, "n": n},
        {"phi_sources": [len(form) for form in data.phi_forms]},
    )
    return data


def _base_case(r: int, d: int) -> EliminationData:
    one, minus = FactoredRational(1), FactoredRational(-1)
    form: LinearForm = {
        var(VarId.s(3)) ** r: one,
        var(VarId.s(2)) ** r: minus,
        var(VarId.s(1)) ** r: minus,
    }
    for i in range(1, r * d - 1):
        form[var(VarId.a(i))] = minus
    return EliminationData(r=r, d=d, n=3, phi_forms=(form,), psi_forms=(form,), lambdas=(one,))


def _inductive_step(prev: EliminationData, n: int) -> EliminationData:
    r, rd = prev.r, prev.rd
    k = rd + 2 - n
    alpha = var(VarId.a(k))
    p = var(VarId.p(n - 3))

    # t^r = s_2^r + sum_j a_j p^j + sum_i phi_i p^(rd-1-i) + s_1^r p^rd, split by alpha
    known: Dict[MultiPoly, List[FactoredRational]] = {}

    def put(source: MultiPoly, coeff):
        known.setdefault(source, []).append(FactoredRational.lift(coeff))

    put(var(VarId.t(n - 3)) ** r, 1)
    put(var(VarId.s(2)) ** r, -1)
    put(var(VarId.s(1)) ** r, -(p ** rd))
    for j in range(1, k):
        put(var(VarId.a(j)), -(p ** j))

    tilde_terms = [FactoredRational(1)]
    slopes = []
    for i, form in zip(range(n - 4, -1, -1), prev.phi_forms):
        if any(not coeff.numerator.involves_only(Family.P) for coeff in form.values()):
            raise NonLinearOccurrence(f"{alpha} may occur non-linearly in phi_{i}")
        exponent = rd - 1 - i
        slope = form.get(alpha, FactoredRational(0))
        tilde_terms.append(slope * p ** (exponent - k))
        for source, coeff in form.items():
            if source != alpha:
                put(source, coeff * -(p ** exponent))
        slopes.append(slope)

    lambda_tilde = _sum(tilde_terms)
    if not lambda_tilde.numerator.involves_only(Family.P):
        raise InternalInconsistency("lambda-tilde depends on more than the p variables")
    lam = (lambda_tilde * p ** k).normalized()
    psi = _collect(known)
    inverse = lam.reciprocal()
    solved = {source: (coeff * inverse).normalized() for source, coeff in psi.items()}

    phi_forms = [solved]
    for slope, form in zip(slopes, prev.phi_forms):
        collected = {source: [coeff] for source, coeff in form.items() if source != alpha}
        if not slope.is_zero():
            for source, coeff in solved.items():
                collected.setdefault(source, []).append(slope * coeff)
        phi_forms.append(_collect(collected))

    lambdas = (lam,) + prev.lambdas
    # psi_i = phi_i * lambda_i; the lambdas below the new step are unchanged
    psi_forms = [psi] + [_scaled(form, lam_i) for form, lam_i in zip(phi_forms[1:], lambdas[1:])]
    return EliminationData(
        r=r,
        d=prev.d,
        n=n,
        phi_forms=tuple(phi_forms),
        psi_forms=tuple(psi_forms),
        lambdas=lambdas,
        lambda_tilde=(lambda_tilde,) + prev.lambda_tilde,
    )


@dataclass(frozen=True)
class FarPoint:
    a_coeffs: Tuple[Fraction, ...]
    p_values: Tuple[Fraction, ...]
    s_values: Tuple[Fraction, ...]
    t_values: Tuple[Fraction, ...]

    def __post_init__(self):
        for name in ("a_coeffs", "p_values", "s_values", "t_values"):
            object.__setattr__(self, name, tuple(Fraction(x) for x in getattr(self, name)))
        if len(self.s_values) != 3:
            raise DegreeMismatch("a point carries exactly three s values")
        if len(self.t_values) != len(self.p_values):
            raise DegreeMismatch("p and t values must pair up")
        if len(set(self.p_values)) != len(self.p_values) or {0, 1} & set(self.p_values):
            raise ConstraintViolated("p values must be pairwise distinct and avoid 0 and 1")

    def assignment(self) -> Dict[VarId, Fraction]:
        out: Dict[VarId, Fraction] = {}
        for j, value in enumerate(self.a_coeffs, start=1):
            out[VarId.a(j)] = value
        for i, (p, t) in enumerate(zip(self.p_values, self.t_values), start=1):
            out[VarId.p(i)] = p
            out[VarId.t(i)] = t
        for i, value in enumerate(self.s_values, start=1):
            out[VarId.s(i)] = value
        return out


@dataclass(frozen=True)
class ConstrainedPoint:
    form: BinaryForm
    p_values: Tuple[Fraction, ...]
    s_values: Tuple[Fraction, ...]
    t_values: Tuple[Fraction, ...]

    def violations(self, r: int) -> List[str]:
        f = self.form
        s1, s2, s3 = self.s_values
        failed = []
        if f.evaluate(0, 1) != s1 ** r:
            failed.append("f(0,1) = s_1^r")
        if f.evaluate(1, 0) != s2 ** r:
            failed.append("f(1,0) = s_2^r")
        if f.evaluate(1, 1) != s3 ** r:
            failed.append("f(1,1) = s_3^r")
        for i, (p, t) in enumerate(zip(self.p_values, self.t_values), start=1):
            if f.evaluate(1, p) != t ** r:
                failed.append(f"f(1,p_{i}) = t_{i}^r")
        return failed


def _check_shape(data: EliminationData, pt: FarPoint):
    if len(pt.a_coeffs) != data.free_count or len(pt.p_values) != data.n - 3:
        raise DegreeMismatch(
            f"expected {data.free_count} a-coefficients and {data.n - 3} p values, "
            f"got {len(pt.a_coeffs)} and {len(pt.p_values)}"
        )


def apply_g(data: EliminationData, pt: FarPoint) -> ConstrainedPoint:
    _check_shape(data, pt)
    coefficients = data.coefficient_values(pt.assignment())
    return ConstrainedPoint(BinaryForm(coefficients), pt.p_values, pt.s_values, pt.t_values)


def apply_h(data: EliminationData, cp: ConstrainedPoint) -> FarPoint:
    if cp.form.degree != data.rd or len(cp.p_values) != data.n - 3:
        raise DegreeMismatch(f"expected a degree-{data.rd} form with {data.n - 3} marked p values")
    failed = cp.violations(data.r)
    if failed:
        raise ConstraintViolated("constraint(s) fail: " + ", ".join(failed))
    return FarPoint(cp.form.coefficients[1:data.free_count + 1], cp.p_values, cp.s_values, cp.t_values)


def _denominators_vanish(data: EliminationData, assignment: Dict[VarId, Fraction]) -> bool:
    return any(not factor.evaluate(assignment) for factor in data.denominator_factors())


def sample_far_point(data: EliminationData, rng: np.random.Generator, height: Optional[int] = None) -> FarPoint:
    """Random point of the open locus, by rejection."""
    height = height or Config.SAMPLE_HEIGHT
    while True:
        a_coeffs = [random_rational(rng, height) for _ in range(data.free_count)]
        p_values: List[Fraction] = []
        while len(p_values) < data.n - 3:
            value = random_rational(rng, height)
            if value not in (0, 1) and value not in p_values:
                p_values.append(value)
        s_values = [random_rational(rng, height) for _ in range(3)]
        t_values = [random_rational(rng, height) for _ in range(data.n - 3)]
        pt = FarPoint(a_coeffs, p_values, s_values, t_values)
        if not _denominators_vanish(data, pt.assignment()):
            return pt


def scale_far_point(data: EliminationData, pt: FarPoint, a: Fraction) -> FarPoint:
    """Weighted G_m action: a-coefficients by a^(-rd), s and t by a^(-d), p fixed."""
    a = Fraction(a)
    heavy = a ** (-data.rd)
    light = a ** (-data.d)
    return FarPoint(
        [heavy * x for x in pt.a_coeffs],
        pt.p_values,
        [light * x for x in pt.s_values],
        [light * x for x in pt.t_values],
    )


def solve_by_linear_system(data: EliminationData, pt: FarPoint) -> List[Fraction]:
    """Independent oracle: solve the rd+1 linear conditions on f's coefficients with sympy."""
    _check_shape(data, pt)
    rd, r = data.rd, data.r
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []

    def unit(j: int) -> List[Fraction]:
        row = [Fraction(0)] * (rd + 1)
        row[j] = Fraction(1)
        return row

    s1, s2, s3 = pt.s_values
    rows += [unit(0), unit(rd), [Fraction(1)] * (rd + 1)]
    rhs += [s2 ** r, s1 ** r, s3 ** r]
    for p, t in zip(pt.p_values, pt.t_values):
        rows.append([p ** j for j in range(rd + 1)])
        rhs.append(t ** r)
    for j, value in enumerate(pt.a_coeffs, start=1):
        rows.append(unit(j))
        rhs.append(value)

    def rational(x: Fraction):
        return sympy.Rational(x.numerator, x.denominator)

    matrix = sympy.Matrix([[rational(x) for x in row] for row in rows])
    solution = matrix.LUsolve(sympy.Matrix([rational(x) for x in rhs]))
    return [Fraction(int(value.p), int(value.q)) for value in solution]


def equivariance_check(data: EliminationData, pt: FarPoint, a: Fraction) -> bool:
    """g_n(a . pt) is a^(-rd) times g_n(pt), p values unchanged."""
    base = apply_g(data, pt)
    moved = apply_g(data, scale_far_point(data, pt, a))
    factor = Fraction(a) ** (-data.rd)
    return moved.p_values == base.p_values and moved.form == base.form.scaled(factor)


def delta_value(data: EliminationData, pt: FarPoint) -> Fraction:
    """The pulled-back discriminant: disc of the form g_n(pt)."""
    form = apply_g(data, pt).form
    return evaluate_discriminant(form, symbolic=data.rd <= Config.SYMBOLIC_DISC_MAX_DEGREE)


def delta_weight_holds(data: EliminationData, pt: FarPoint, a: Fraction, weight: Optional[int] = None) -> bool:
    """Phi(a . pt) == a^(-weight) Phi(pt); the weight defaults to 2rd(rd-1)."""
    a = Fraction(a)
    if weight is None:
        weight = 2 * data.rd * (data.rd - 1)
    return delta_value(data, scale_far_point(data, pt, a)) == a ** (-weight) * delta_value(data, pt)


def lambda_tilde_failures(data: EliminationData, i: int) -> List[str]:
    """Checks lambda-tilde_i = (1 - p_i) prod_{j<i} (1 - p_i/p_j) symbolically."""
    lt = data.lambda_tilde_of(i)
    numerator = lt.numerator
    denominator = lt.denominator()
    p = VarId.p(i)
    pi = var(p)
    failed = []
    if not numerator.involves_only(Family.P):
        failed.append("numerator involves non-p variables")
    if numerator.degree_in(p) != i:
        failed.append(f"degree in p_{i} is {numerator.degree_in(p)}, expected {i}")
    if numerator.coefficient(p, 0) != denominator:
        failed.append("constant term is not 1")
    if not numerator.substitute(p, 1).is_zero():
        failed.append(f"does not vanish at p_{i} = 1")
    for j in range(1, i):
        if not numerator.substitute(p, var(VarId.p(j))).is_zero():
            failed.append(f"does not vanish at p_{i} = p_{j}")
    lhs = numerator
    rhs = denominator * (1 - pi)
    for j in range(1, i):
        lhs = lhs * var(VarId.p(j))
        rhs = rhs * (var(VarId.p(j)) - pi)
    if lhs != rhs:
        failed.append("root set differs from {1, p_1, ...}")
    return failed


@dataclass
class _TrialOutcome:
    round_trip: bool = True
    constraints: bool = True
    oracle: bool = True
    quotients: bool = True
    equivariance: bool = True
    notes: List[str] = field(default_factory=list)


def _run_trial(data: EliminationData, pt: FarPoint, a: Fraction) -> _TrialOutcome:
    outcome = _TrialOutcome()
    try:
        cp = apply_g(data, pt)
        outcome.constraints = not cp.violations(data.r)
        back = apply_h(data, cp)
        outcome.round_trip = back == pt and apply_g(data, back) == cp
        outcome.oracle = list(cp.form.coefficients) == solve_by_linear_system(data, pt)
        assignment = pt.assignment()
        outcome.quotients = all(
            data.phi_value(i, assignment)
            == data.psi_value(i, assignment) / data.lambda_of(i).evaluate(assignment)
            for i in range(data.n - 2)
        )
        outcome.equivariance = equivariance_check(data, pt, a)
    except (DenominatorVanished, ConstraintViolated) as e:
        outcome.round_trip = outcome.constraints = False
        outcome.notes.append(str(e))
    return outcome


def verify_parametrisation(data: EliminationData, trials: int, seed: int) -> VerificationReport:
    if trials < 1:
        raise InvalidParams("trials must be at least 1")
    report = VerificationReport(
        name="elimination", seed=seed, trials=trials, parameters={"r": data.r, "d": data.d, "n": data.n}
    )
    weights = {Family.A: data.r, Family.S: 1, Family.T: 1, Family.P: 0}
    homogeneous = all(weighted_degree_check(phi.numerator, weights, data.r) for phi in data.phi)
    report.add("weighted_homogeneity", homogeneous, f"{len(data.phi)} phi numerators of weight {data.r}")

    in_p = all(factor.involves_only(Family.P) for factor in data.denominator_factors())
    report.add("denominators_in_p", in_p)
    report.add("lambda_zero", data.lambda_of(0) == 1, "lambda_0 = 1")
    report.add("inductive_steps", len(data.lambda_tilde) == data.n - 3, f"{len(data.lambda_tilde)} steps")

    tilde_failures = []
    for i in range(1, data.n - 2):
        tilde_failures += [f"step {i}: {msg}" for msg in lambda_tilde_failures(data, i)]
    report.add(
        "lambda_tilde",
        not tilde_failures,
        "; ".join(tilde_failures) or f"degree, constant term and roots hold for {data.n - 3} steps",
    )

    rng = np.random.default_rng(seed)
    points = [sample_far_point(data, rng) for _ in range(trials)]
    scalars = [random_rational(rng, Config.SAMPLE_HEIGHT, nonzero=True) for _ in range(trials)]
    with ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as executor:
        outcomes = list(executor.map(lambda args: _run_trial(data, *args), zip(points, scalars)))

    def tally(name: str) -> Tuple[bool, str]:
        good = sum(1 for outcome in outcomes if getattr(outcome, name))
        return good == trials, f"{good}/{trials} points"

    report.add("round_trip", *tally("round_trip"))
    report.add("constraint_equations", *tally("constraints"))
    report.add("linear_solve_oracle", *tally("oracle"))
    report.add("phi_equals_psi_over_lambda", *tally("quotients"))
    report.add("equivariance", *tally("equivariance"))
    Observability.log_step(
        "verify_parametrisation",
        {"r": data.r, "d": data.d, "n": data.n, "trials": trials, "seed": seed},
        {"passed": report.passed},
    )
    return report
