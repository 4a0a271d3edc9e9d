"""Binary forms, Sylvester resultants, discriminants and the GL2 action."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from Picard.config import Config
from Picard.errors import DegreeMismatch, DegreeTooSmall, OutOfRange, SingularMatrix
from Picard.lattices import bareiss_determinant
from Picard.symbolic_core import MultiPoly, VarId, var

Coefficient = Union[Fraction, MultiPoly]


def _coefficient(value) -> Coefficient:
    if isinstance(value, MultiPoly):
        return value
    if isinstance(value, float):
        raise TypeError("floating-point coefficients are not allowed")
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def _is_zero(value) -> bool:
    return value.is_zero() if isinstance(value, MultiPoly) else value == 0


def random_rational(rng: np.random.Generator, height: int, nonzero: bool = False) -> Fraction:
    while True:
        value = Fraction(int(rng.integers(-height, height + 1)), int(rng.integers(1, height + 1)))
        if value or not nonzero:
            return value


class BinaryForm:
    """f(x, y) = sum_i a_i x^(m-i) y^i, coefficients a_0..a_m."""

    __slots__ = ("degree", "coefficients")

    def __init__(self, coefficients: Sequence, degree: Optional[int] = None):
        coeffs = tuple(_coefficient(c) for c in coefficients)
        if degree is None:
            degree = len(coeffs) - 1
        if degree < 0 or len(coeffs) != degree + 1:
            raise DegreeMismatch(f"a degree-{degree} form needs {degree + 1} coefficients, got {len(coeffs)}")
        self.degree = degree
        self.coefficients = coeffs

    @classmethod
    def symbolic(cls, m: int) -> "BinaryForm":
        return cls([var(VarId.a(i)) for i in range(m + 1)])

    @classmethod
    def parse(cls, text: str) -> "BinaryForm":
        parts = [part for part in text.split(",")]
        if not parts or any(not part.strip() for part in parts):
            raise ValueError(f"expected a comma-separated coefficient list, got {text!r}")
        try:
            return cls([Fraction(part.strip()) for part in parts])
        except ZeroDivisionError:
            raise ValueError(f"zero denominator in {text!r}")

    @classmethod
    def random(cls, rng: np.random.Generator, m: int, height: int = None) -> "BinaryForm":
        height = height or Config.SAMPLE_HEIGHT
        return cls([random_rational(rng, height) for _ in range(m + 1)])

    @property
    def is_symbolic(self) -> bool:
        return any(isinstance(c, MultiPoly) for c in self.coefficients)

    def evaluate(self, x, y):
        m = self.degree
        return sum((c * x ** (m - i) * y ** i for i, c in enumerate(self.coefficients)), Fraction(0))

    def partial_x(self) -> "BinaryForm":
        m = self.degree
        return BinaryForm([(m - i) * self.coefficients[i] for i in range(m)], m - 1)

    def partial_y(self) -> "BinaryForm":
        m = self.degree
        return BinaryForm([(j + 1) * self.coefficients[j + 1] for j in range(m)], m - 1)

    def scaled(self, factor) -> "BinaryForm":
        return BinaryForm([c * factor for c in self.coefficients], self.degree)

    def __mul__(self, other: "BinaryForm") -> "BinaryForm":
        return BinaryForm(_convolve(self.coefficients, other.coefficients), self.degree + other.degree)

    def __eq__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        return self.degree == other.degree and all(a == b for a, b in zip(self.coefficients, other.coefficients))

    __hash__ = None

    def coefficient_texts(self) -> List[str]:
        return [rational_text(c) for c in self.coefficients]

    def __repr__(self):
        return f"BinaryForm({', '.join(self.coefficient_texts())})"


def rational_text(value) -> str:
    if isinstance(value, MultiPoly):
        return value.to_text()
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _convolve(u: Sequence, v: Sequence) -> List:
    out = [Fraction(0)] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if _is_zero(a):
            continue
        for j, b in enumerate(v):
            out[i + j] = out[i + j] + a * b
    return out


@dataclass(frozen=True)
class Mat2:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, _coefficient(getattr(self, name)))

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    @classmethod
    def diag(cls, x, y) -> "Mat2":
        return cls(x, 0, 0, y)

    @classmethod
    def swap(cls) -> "Mat2":
        return cls(0, 1, 1, 0)

    @classmethod
    def random(cls, rng: np.random.Generator, height: int = 20) -> "Mat2":
        while True:
            matrix = cls(*(random_rational(rng, height) for _ in range(4)))
            if matrix.det():
                return matrix

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Mat2":
        det = self.det()
        if not det:
            raise SingularMatrix("matrix is not invertible")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


def gl2_action(matrix: Mat2, form: BinaryForm) -> BinaryForm:
    """A . f = f(A^-1 (x, y))."""
    inv = matrix.inverse()
    m = form.degree
    x_powers = [[Fraction(1)]]
    y_powers = [[Fraction(1)]]
    for _ in range(m):
        x_powers.append(_convolve(x_powers[-1], [inv.a, inv.b]))
        y_powers.append(_convolve(y_powers[-1], [inv.c, inv.d]))
    out = [Fraction(0)] * (m + 1)
    for i, coeff in enumerate(form.coefficients):
        if _is_zero(coeff):
            continue
        for k, value in enumerate(_convolve(x_powers[m - i], y_powers[i])):
            if value:
                out[k] = out[k] + coeff * value
    return BinaryForm(out, m)


def sylvester_matrix(f: Sequence, g: Sequence, deg_f: Optional[int] = None, deg_g: Optional[int] = None) -> List[List]:
    """Sylvester matrix of two univariate polynomials, coefficients highest degree first."""
    f = _trim(list(f), deg_f)
    g = _trim(list(g), deg_g)
    m1, m2 = len(f) - 1, len(g) - 1
    size = m1 + m2
    zero = Fraction(0)
    rows = []
    for i in range(m2):
        rows.append([zero] * i + f + [zero] * (size - i - m1 - 1))
    for i in range(m1):
        rows.append([zero] * i + g + [zero] * (size - i - m2 - 1))
    return rows


def _trim(coeffs: List, declared: Optional[int]) -> List:
    if not coeffs:
        raise DegreeMismatch("a polynomial needs at least one coefficient")
    if declared is None:
        return coeffs
    if declared > len(coeffs) - 1:
        raise DegreeMismatch(f"declared degree {declared} exceeds the {len(coeffs)} coefficients given")
    extra = len(coeffs) - 1 - declared
    if any(not _is_zero(c) for c in coeffs[:extra]):
        raise DegreeMismatch(f"declared degree {declared} drops nonzero leading coefficients")
    return coeffs[extra:]


def sylvester_resultant(f: Sequence, g: Sequence, deg_f: Optional[int] = None, deg_g: Optional[int] = None):
    rows = sylvester_matrix(f, g, deg_f, deg_g)
    if any(isinstance(entry, MultiPoly) for row in rows for entry in row):
        return cofactor_determinant(rows)
    return Fraction(bareiss_determinant(rows))


def cofactor_determinant(rows: Sequence[Sequence]) -> MultiPoly:
    """Laplace expansion along rows, memoised on the set of used columns.

    Sparse banded matrices such as Sylvester matrices keep the number of
    reachable column subsets small.
    """
    size = len(rows)
    entries = [
        [(j, entry) for j, entry in enumerate(row) if not _is_zero(entry)]
        for row in rows
    ]
    memo: Dict[int, MultiPoly] = {}

    def minor(row: int, used: int) -> MultiPoly:
        if row == size:
            return MultiPoly.constant(1)
        cached = memo.get(used)
        if cached is not None:
            return cached
        total = MultiPoly()
        for j, entry in entries[row]:
            if used >> j & 1:
                continue
            rest = minor(row + 1, used | (1 << j))
            if rest.is_zero():
                continue
            position = j - bin(used & ((1 << j) - 1)).count("1")
            term = rest * entry
            total = total - term if position % 2 else total + term
        memo[used] = total
        return total

    return minor(0, 0)


def discriminant(form: BinaryForm):
    """Res(df/dx, df/dy) with both partials read as degree-(m-1) forms."""
    if form.degree < 2:
        raise DegreeTooSmall(f"discriminant needs degree >= 2, got {form.degree}")
    m = form.degree
    return sylvester_resultant(form.partial_x().coefficients, form.partial_y().coefficients, m - 1, m - 1)


@lru_cache(maxsize=None)
def discriminant_polynomial(m: int) -> MultiPoly:
    """Symbolic discriminant of the generic degree-m form in a_0..a_m."""
    if m < 2:
        raise DegreeTooSmall(f"discriminant needs degree >= 2, got {m}")
    if m > Config.SYMBOLIC_DISC_MAX_DEGREE:
        raise OutOfRange(f"symbolic discriminant is only expanded up to degree {Config.SYMBOLIC_DISC_MAX_DEGREE}")
    return discriminant(BinaryForm.symbolic(m))


def evaluate_discriminant(form: BinaryForm, symbolic: bool = False) -> Fraction:
    """Numeric discriminant; with symbolic=True the cached generic polynomial is evaluated."""
    if symbolic:
        polynomial = discriminant_polynomial(form.degree)
        return polynomial.evaluate({VarId.a(i): c for i, c in enumerate(form.coefficients)})
    return discriminant(form)


def equivariance_weight_check(form: BinaryForm, matrix: Mat2) -> bool:
    """disc(A . f) == det(A)^(-m(m-1)) disc(f), exactly."""
    det = matrix.det()
    if not det:
        raise SingularMatrix("matrix is not invertible")
    m = form.degree
    if m < 2:
        raise DegreeTooSmall(f"discriminant needs degree >= 2, got {m}")
    return discriminant(gl2_action(matrix, form)) == det ** (-m * (m - 1)) * discriminant(form)


def square_factor_form(alpha, beta, cofactor: BinaryForm) -> BinaryForm:
    """(alpha x + beta y)^2 * cofactor, a form with a repeated root."""
    linear = BinaryForm([alpha, beta])
    return linear * linear * cofactor

