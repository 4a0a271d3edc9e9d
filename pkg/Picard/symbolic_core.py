"""Exact sparse multivariate polynomials and factored rational functions.

Coefficients are ``fractions.Fraction`` throughout; no float ever enters a
polynomial.  Monomials are ordered graded-lexicographically over the variable
order ``a < p < s < t < x < y`` (then by index), which fixes the text form.
"""
from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from Picard.errors import DenominatorVanished, InvalidParams, MissingVariable, NotDivisible, PicardError

Number = Union[int, Fraction]


class Family(IntEnum):
    A = 0
    P = 1
    S = 2
    T = 3
    X = 4
    Y = 5

    @property
    def symbol(self) -> str:
        return self.name.lower()


@dataclass(frozen=True, order=True)
class VarId:
    family: Family
    index: int = 0

    def __post_init__(self):
        if self.index < 0:
            raise InvalidParams(f"variable index must be non-negative, got {self.index}")
        if self.family == Family.S and self.index not in (1, 2, 3):
            raise InvalidParams(f"s variables are s_1, s_2, s_3; got s_{self.index}")

    @classmethod
    def a(cls, i: int) -> "VarId":
        return cls(Family.A, i)

    @classmethod
    def p(cls, i: int) -> "VarId":
        return cls(Family.P, i)

    @classmethod
    def s(cls, i: int) -> "VarId":
        return cls(Family.S, i)

    @classmethod
    def t(cls, i: int) -> "VarId":
        return cls(Family.T, i)

    @property
    def name(self) -> str:
        if self.family in (Family.X, Family.Y) and self.index == 0:
            return self.family.symbol
        return f"{self.family.symbol}_{self.index}"

    @classmethod
    def parse(cls, text: str) -> "VarId":
        match = _VAR_PATTERN.match(text)
        if not match:
            raise ValueError(f"not a variable name: {text!r}")
        family = Family[match.group(1).upper()]
        if match.group(2) is None:
            if family not in (Family.X, Family.Y):
                raise ValueError(f"variable {text!r} needs an index")
            return cls(family, 0)
        return cls(family, int(match.group(2)))

    def __str__(self):
        return self.name


_VAR_PATTERN = re.compile(r"^([apstxy])(?:_(\d+))?$")

X = VarId(Family.X)
Y = VarId(Family.Y)


class Monomial:
    """Product of variable powers; stored sorted, zero exponents dropped."""

    __slots__ = ("powers", "degree", "_key", "_hash")

    def __init__(self, powers: Union[Mapping[VarId, int], Iterable[Tuple[VarId, int]]] = ()):
        items = powers.items() if isinstance(powers, Mapping) else powers
        merged: Dict[VarId, int] = {}
        for var, exp in items:
            if exp < 0:
                raise ValueError(f"negative exponent for {var.name}")
            if exp:
                merged[var] = merged.get(var, 0) + exp
        self._setup(tuple(sorted(merged.items())))

    def _setup(self, powers: Tuple[Tuple[VarId, int], ...]):
        self.powers = powers
        self.degree = sum(exp for _, exp in powers)
        # larger key == larger monomial in graded lex order
        self._key = (self.degree, tuple(((-var.family, -var.index), exp) for var, exp in powers))
        self._hash = hash(powers)

    @classmethod
    def _from_sorted(cls, powers: Tuple[Tuple[VarId, int], ...]) -> "Monomial":
        mono = object.__new__(cls)
        mono._setup(powers)
        return mono

    @property
    def sort_key(self):
        return self._key

    def exponent(self, var: VarId) -> int:
        for v, exp in self.powers:
            if v == var:
                return exp
        return 0

    def variables(self):
        return [var for var, _ in self.powers]

    def without(self, var: VarId) -> "Monomial":
        return Monomial._from_sorted(tuple((v, e) for v, e in self.powers if v != var))

    def divides(self, other: "Monomial") -> bool:
        theirs = dict(other.powers)
        return all(theirs.get(var, 0) >= exp for var, exp in self.powers)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not other.powers:
            return self
        if not self.powers:
            return other
        merged = dict(self.powers)
        for var, exp in other.powers:
            merged[var] = merged.get(var, 0) + exp
        return Monomial._from_sorted(tuple(sorted(merged.items())))

    def __truediv__(self, other: "Monomial") -> "Monomial":
        merged = dict(self.powers)
        for var, exp in other.powers:
            left = merged.get(var, 0) - exp
            if left < 0:
                raise NotDivisible(f"{other} does not divide {self}")
            if left:
                merged[var] = left
            else:
                del merged[var]
        return Monomial._from_sorted(tuple(sorted(merged.items())))

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.powers == other.powers

    def __hash__(self):
        return self._hash

    def to_text(self) -> str:
        return "*".join(var.name if exp == 1 else f"{var.name}^{exp}" for var, exp in self.powers)

    def __repr__(self):
        return f"Monomial({self.to_text() or '1'})"


ONE_MONOMIAL = Monomial()


class _Descending:
    __slots__ = ("mono",)

    def __init__(self, mono: Monomial):
        self.mono = mono

    def __lt__(self, other: "_Descending") -> bool:
        return self.mono._key > other.mono._key


def _fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floating-point coefficients are not allowed")
    return Fraction(value)


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class MultiPoly:
    """Sparse polynomial: a map Monomial -> nonzero Fraction."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Number]] = None):
        clean: Dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            value = _fraction(coeff)
            if value:
                clean[mono] = value
        self._terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, terms: Dict[Monomial, Fraction]) -> "MultiPoly":
        poly = object.__new__(cls)
        poly._terms = terms
        poly._hash = None
        return poly

    @classmethod
    def constant(cls, value: Number) -> "MultiPoly":
        return cls({ONE_MONOMIAL: value})

    @classmethod
    def variable(cls, var: VarId) -> "MultiPoly":
        return cls._wrap({Monomial._from_sorted(((var, 1),)): Fraction(1)})

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return self._terms

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ONE_MONOMIAL in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get(ONE_MONOMIAL, Fraction(0))

    def variables(self) -> frozenset:
        return frozenset(var for mono in self._terms for var, _ in mono.powers)

    def families(self) -> frozenset:
        return frozenset(var.family for var in self.variables())

    def involves_only(self, *families: Family) -> bool:
        return self.families() <= set(families)

    def total_degree(self) -> int:
        return max((mono.degree for mono in self._terms), default=0)

    def degree_in(self, var: VarId) -> int:
        return max((mono.exponent(var) for mono in self._terms), default=0)

    def coefficient(self, var: VarId, k: int) -> "MultiPoly":
        """Coefficient of var^k, as a polynomial in the other variables."""
        out: Dict[Monomial, Fraction] = {}
        for mono, coeff in self._terms.items():
            if mono.exponent(var) == k:
                out[mono.without(var)] = coeff
        return MultiPoly._wrap(out)

    def leading_term(self) -> Tuple[Monomial, Fraction]:
        if not self._terms:
            raise ValueError("the zero polynomial has no leading term")
        mono = max(self._terms, key=lambda m: m._key)
        return mono, self._terms[mono]

    # ring operations

    @staticmethod
    def _coerce(value) -> Optional["MultiPoly"]:
        if isinstance(value, MultiPoly):
            return value
        if isinstance(value, (int, Fraction)):
            return MultiPoly.constant(value)
        return None

    def __add__(self, other):
        other = MultiPoly._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            value = out.get(mono, 0) + coeff
            if value:
                out[mono] = value
            else:
                out.pop(mono, None)
        return MultiPoly._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._wrap({mono: -coeff for mono, coeff in self._terms.items()})

    def __sub__(self, other):
        other = MultiPoly._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = MultiPoly._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, factor: Number) -> "MultiPoly":
        factor = _fraction(factor)
        if not factor:
            return MultiPoly()
        return MultiPoly._wrap({mono: coeff * factor for mono, coeff in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if self.is_constant():
            return other.scale(self.constant_value())
        if other.is_constant():
            return self.scale(other.constant_value())
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = m1 * m2
                value = out.get(mono, 0) + c1 * c2
                if value:
                    out[mono] = value
                else:
                    del out[mono]
        return MultiPoly._wrap(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial exponent must be a non-negative integer")
        result = MultiPoly.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other):
        other = MultiPoly._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # evaluation and substitution

    def evaluate(self, assignment: Mapping[VarId, Number]) -> Fraction:
        total = Fraction(0)
        cache: Dict[Tuple[VarId, int], Fraction] = {}
        for mono, coeff in self._terms.items():
            value = coeff
            for var, exp in mono.powers:
                power = cache.get((var, exp))
                if power is None:
                    if var not in assignment:
                        raise MissingVariable(f"variable {var.name} is not assigned")
                    power = _fraction(assignment[var]) ** exp
                    cache[(var, exp)] = power
                value *= power
            total += value
        return total

    def substitute(self, var: VarId, value) -> "MultiPoly":
        """Replace var by a polynomial or number."""
        value = MultiPoly._coerce(value)
        if var not in self.variables():
            return self
        powers: Dict[int, MultiPoly] = {}
        out = MultiPoly()
        grouped: Dict[int, Dict[Monomial, Fraction]] = {}
        for mono, coeff in self._terms.items():
            grouped.setdefault(mono.exponent(var), {})[mono.without(var)] = coeff
        for exp, terms in sorted(grouped.items()):
            if exp not in powers:
                powers[exp] = value ** exp
            out = out + MultiPoly._wrap(terms) * powers[exp]
        return out

    def weighted_degrees(self, weights: Mapping[Family, int]) -> frozenset:
        degrees = set()
        for mono in self._terms:
            total = 0
            for var, exp in mono.powers:
                if var.family not in weights:
                    raise MissingVariable(f"no weight given for family {var.family.symbol}")
                total += weights[var.family] * exp
            degrees.add(total)
        return frozenset(degrees)

    # division

    def divmod(self, divisor: "MultiPoly") -> Tuple["MultiPoly", "MultiPoly"]:
        """Multivariate division by a single divisor in graded lex order.

        The remainder is zero exactly when divisor divides self.
        """
        divisor = MultiPoly._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead_mono, lead_coeff = divisor.leading_term()
        tail = [(mono, coeff) for mono, coeff in divisor._terms.items() if mono != lead_mono]
        work = dict(self._terms)
        heap = [_Descending(mono) for mono in work]
        heapq.heapify(heap)
        quotient: Dict[Monomial, Fraction] = {}
        remainder: Dict[Monomial, Fraction] = {}
        while heap:
            mono = heapq.heappop(heap).mono
            coeff = work.pop(mono, None)
            if coeff is None:
                continue
            if not lead_mono.divides(mono):
                remainder[mono] = coeff
                continue
            q_mono = mono / lead_mono
            q_coeff = coeff / lead_coeff
            quotient[q_mono] = q_coeff
            for t_mono, t_coeff in tail:
                product = q_mono * t_mono
                if product not in work:
                    heapq.heappush(heap, _Descending(product))
                value = work.get(product, 0) - q_coeff * t_coeff
                if value:
                    work[product] = value
                else:
                    work.pop(product, None)
        return MultiPoly._wrap(quotient), MultiPoly._wrap(remainder)

    def exact_divide(self, divisor: "MultiPoly") -> "MultiPoly":
        quotient, remainder = self.divmod(divisor)
        if not remainder.is_zero():
            raise NotDivisible(f"{divisor.to_text()} does not divide the polynomial")
        return quotient

    # text form

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda item: item[0]._key, reverse=True)

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for mono, coeff in self.sorted_terms():
            body = mono.to_text()
            magnitude = abs(coeff)
            if not body:
                piece = _format_rational(magnitude)
            elif magnitude == 1:
                piece = body
            else:
                piece = f"{_format_rational(magnitude)}*{body}"
            pieces.append(("-" if coeff < 0 else "+", piece))
        first_sign, first = pieces[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, piece in pieces[1:]:
            text += f" {sign} {piece}"
        return text

    @classmethod
    def parse(cls, text: str) -> "MultiPoly":
        compact = "".join(text.split())
        if not compact:
            raise ValueError("empty polynomial text")
        tokens = _TERM_PATTERN.findall(compact)
        if "".join(tokens) != compact:
            raise ValueError(f"cannot parse polynomial {text!r}")
        out = cls()
        for token in tokens:
            sign = -1 if token.startswith("-") else 1
            body = token.lstrip("+-")
            coeff = Fraction(sign)
            powers: List[Tuple[VarId, int]] = []
            for factor in body.split("*"):
                if _NUMBER_PATTERN.match(factor):
                    coeff *= Fraction(factor)
                    continue
                name, _, exp = factor.partition("^")
                if exp and not exp.isdigit():
                    raise ValueError(f"bad exponent in {factor!r}")
                powers.append((VarId.parse(name), int(exp) if exp else 1))
            out = out + cls({Monomial(powers): coeff})
        return out

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MultiPoly({self.to_text()})"


_TERM_PATTERN = re.compile(r"[+-]?[^+-]+")
_NUMBER_PATTERN = re.compile(r"^\d+(/\d+)?$")


def var(v: VarId) -> MultiPoly:
    return MultiPoly.variable(v)


def const(value: Number) -> MultiPoly:
    return MultiPoly.constant(value)


def poly_arith(op: str, a: MultiPoly, b=None) -> MultiPoly:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "pow":
        return a ** b
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_eval(p: MultiPoly, assignment: Mapping[VarId, Number]) -> Fraction:
    return p.evaluate(assignment)


def poly_substitute(p: MultiPoly, v: VarId, value) -> "FactoredRational":
    value = FactoredRational.lift(value)
    if v not in p.variables():
        return FactoredRational(p)
    result = FactoredRational(0)
    power = FactoredRational(1)
    for k in range(p.degree_in(v) + 1):
        coeff = p.coefficient(v, k)
        if not coeff.is_zero():
            result = result + power * coeff
        power = power * value
    return result


def weighted_degree_check(p: MultiPoly, weights: Mapping[Family, int], expected: int) -> bool:
    return p.weighted_degrees(weights) <= {expected}


def split_p_factors(poly: MultiPoly) -> Tuple[Fraction, List[Tuple[MultiPoly, int]]]:
    """Split a polynomial in p variables into known linear factors.

    Tries p_i, p_i - 1 and p_i - p_j by exact division; whatever survives is
    returned as one extra factor (or folded into the scalar if constant).
    """
    if poly.is_zero():
        raise DenominatorVanished("cannot divide by the zero polynomial")
    if not poly.involves_only(Family.P):
        raise PicardError("denominators may only involve p variables")
    factors: List[Tuple[MultiPoly, int]] = []
    names = sorted(poly.variables())
    for v in names:
        low = min(mono.exponent(v) for mono in poly.terms)
        if low:
            shift = Monomial._from_sorted(((v, low),))
            poly = MultiPoly._wrap({mono / shift: coeff for mono, coeff in poly.terms.items()})
            factors.append((var(v), low))
    candidates = [var(v) - 1 for v in names]
    candidates += [var(v) - var(w) for i, v in enumerate(names) for w in names[i + 1:]]
    for candidate in candidates:
        multiplicity = 0
        while not poly.is_constant():
            quotient, remainder = poly.divmod(candidate)
            if not remainder.is_zero():
                break
            poly = quotient
            multiplicity += 1
        if multiplicity:
            factors.append((candidate, multiplicity))
    if poly.is_constant():
        return poly.constant_value(), factors
    factors.append((poly, 1))
    return Fraction(1), factors


def _factor_key(factor: MultiPoly):
    return (factor.total_degree(), len(factor), factor.to_text())


class FactoredRational:
    """numerator / prod(factor^multiplicity), factors monic polynomials in p."""

    __slots__ = ("numerator", "denominator_factors")

    def __init__(self, numerator, denominator_factors: Iterable[Tuple[MultiPoly, int]] = ()):
        numerator = MultiPoly._coerce(numerator)
        if numerator is None:
            raise TypeError("numerator must be a polynomial or rational")
        merged: Dict[MultiPoly, int] = {}
        scale = Fraction(1)
        for factor, multiplicity in denominator_factors:
            factor = MultiPoly._coerce(factor)
            if multiplicity <= 0:
                raise ValueError("denominator multiplicities must be positive")
            if factor.is_zero():
                raise DenominatorVanished("a denominator factor is the zero polynomial")
            if not factor.involves_only(Family.P):
                raise PicardError(f"denominator factor {factor} involves non-p variables")
            if factor.is_constant():
                scale *= factor.constant_value() ** multiplicity
                continue
            lead = factor.leading_term()[1]
            if lead != 1:
                factor = factor.scale(1 / lead)
                scale *= lead ** multiplicity
            merged[factor] = merged.get(factor, 0) + multiplicity
        if scale != 1:
            numerator = numerator.scale(1 / scale)
        self._assign(numerator, merged)

    def _assign(self, numerator: MultiPoly, factors: Mapping[MultiPoly, int]):
        self.numerator = numerator
        if numerator.is_zero():
            self.denominator_factors = ()
        else:
            self.denominator_factors = tuple(sorted(factors.items(), key=lambda item: _factor_key(item[0])))

    @classmethod
    def _make(cls, numerator: MultiPoly, factors: Mapping[MultiPoly, int]) -> "FactoredRational":
        fr = object.__new__(cls)
        fr._assign(numerator, {f: m for f, m in factors.items() if m})
        return fr

    @classmethod
    def lift(cls, value) -> "FactoredRational":
        if isinstance(value, FactoredRational):
            return value
        return cls(value)

    @classmethod
    def combine(cls, pairs: Iterable[Tuple["FactoredRational", MultiPoly]]) -> "FactoredRational":
        """Sum of coefficient * polynomial over the least common factored denominator."""
        pairs = [(cls.lift(coeff), MultiPoly._coerce(poly)) for coeff, poly in pairs]
        common: Dict[MultiPoly, int] = {}
        for coeff, _ in pairs:
            for factor, multiplicity in coeff.denominator_factors:
                common[factor] = max(common.get(factor, 0), multiplicity)
        terms: Dict[Monomial, Fraction] = {}
        for coeff, poly in pairs:
            if coeff.is_zero():
                continue
            piece = coeff.numerator * _product(common, coeff._factor_map()) * poly
            for mono, value in piece.terms.items():
                total = terms.get(mono, 0) + value
                if total:
                    terms[mono] = total
                else:
                    terms.pop(mono, None)
        return cls._make(MultiPoly._wrap(terms), common)

    def is_polynomial(self) -> bool:
        return not self.denominator_factors

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def denominator(self) -> MultiPoly:
        out = MultiPoly.constant(1)
        for factor, multiplicity in self.denominator_factors:
            out = out * factor ** multiplicity
        return out

    def variables(self) -> frozenset:
        names = set(self.numerator.variables())
        for factor, _ in self.denominator_factors:
            names |= factor.variables()
        return frozenset(names)

    def _factor_map(self) -> Dict[MultiPoly, int]:
        return dict(self.denominator_factors)

    def __add__(self, other):
        other = FactoredRational.lift(other)
        mine, theirs = self._factor_map(), other._factor_map()
        if mine == theirs:
            return FactoredRational._make(self.numerator + other.numerator, mine)
        common = dict(mine)
        for factor, multiplicity in theirs.items():
            common[factor] = max(common.get(factor, 0), multiplicity)
        left = self.numerator * _product(common, mine)
        right = other.numerator * _product(common, theirs)
        return FactoredRational._make(left + right, common)

    __radd__ = __add__

    def __neg__(self):
        return FactoredRational._make(-self.numerator, self._factor_map())

    def __sub__(self, other):
        return self + (-FactoredRational.lift(other))

    def __rsub__(self, other):
        return FactoredRational.lift(other) + (-self)

    def __mul__(self, other):
        other = FactoredRational.lift(other)
        factors = self._factor_map()
        for factor, multiplicity in other.denominator_factors:
            factors[factor] = factors.get(factor, 0) + multiplicity
        return FactoredRational._make(self.numerator * other.numerator, factors)

    __rmul__ = __mul__

    def reciprocal(self) -> "FactoredRational":
        scalar, factors = split_p_factors(self.numerator)
        return FactoredRational(self.denominator().scale(1 / scalar), factors)

    def __truediv__(self, other):
        return self * FactoredRational.lift(other).reciprocal()

    def __rtruediv__(self, other):
        return FactoredRational.lift(other) * self.reciprocal()

    def normalized(self) -> "FactoredRational":
        """Cancel each denominator factor as often as it divides the numerator."""
        numerator = self.numerator
        if numerator.is_zero():
            return FactoredRational(0)
        remaining: Dict[MultiPoly, int] = {}
        for factor, multiplicity in self.denominator_factors:
            while multiplicity:
                quotient, remainder = numerator.divmod(factor)
                if not remainder.is_zero():
                    break
                numerator = quotient
                multiplicity -= 1
            if multiplicity:
                remaining[factor] = multiplicity
        return FactoredRational._make(numerator, remaining)

    def evaluate(self, assignment: Mapping[VarId, Number]) -> Fraction:
        denominator = Fraction(1)
        for factor, multiplicity in self.denominator_factors:
            value = factor.evaluate(assignment)
            if not value:
                raise DenominatorVanished(f"denominator factor {factor.to_text()} vanishes")
            denominator *= value ** multiplicity
        return self.numerator.evaluate(assignment) / denominator

    def degree_in(self, v: VarId) -> int:
        return self.numerator.degree_in(v)

    def coefficient(self, v: VarId, k: int) -> "FactoredRational":
        if any(v in factor.variables() for factor, _ in self.denominator_factors):
            raise PicardError(f"{v.name} occurs in a denominator")
        return FactoredRational._make(self.numerator.coefficient(v, k), self._factor_map())

    def substitute(self, v: VarId, value) -> "FactoredRational":
        if any(v in factor.variables() for factor, _ in self.denominator_factors):
            value = MultiPoly._coerce(value)
            if value is None or not value.involves_only(Family.P):
                raise PicardError(f"{v.name} occurs in a denominator; only p-polynomials may replace it")
            return FactoredRational(
                self.numerator.substitute(v, value),
                [(factor.substitute(v, value), m) for factor, m in self.denominator_factors],
            )
        return poly_substitute(self.numerator, v, value) * FactoredRational._make(MultiPoly.constant(1), self._factor_map())

    def equals(self, other) -> bool:
        other = FactoredRational.lift(other)
        return self.numerator * other.denominator() == other.numerator * self.denominator()

    def __eq__(self, other):
        if not isinstance(other, (FactoredRational, MultiPoly, int, Fraction)):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def to_text(self) -> str:
        top = self.numerator.to_text()
        if not self.denominator_factors:
            return top
        parts = []
        for factor, multiplicity in self.denominator_factors:
            base = factor.to_text() if len(factor) == 1 else f"({factor.to_text()})"
            parts.append(base if multiplicity == 1 else f"{base}^{multiplicity}")
        return f"({top})/({'*'.join(parts)})"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"FactoredRational({self.to_text()})"


def _product(common: Mapping[MultiPoly, int], own: Mapping[MultiPoly, int]) -> MultiPoly:
    out = MultiPoly.constant(1)
    for factor, multiplicity in common.items():
        extra = multiplicity - own.get(factor, 0)
        if extra:
            out = out * factor ** extra
    return out
