"""Pic of the stack of n-pointed uniform cyclic covers of the line.

Pic = (free quotient of the divisor classes [Z^{i,j,l}]) (+) Pic(far locus),
where the far part is a character lattice modulo the class of the
discriminant divisor.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator

from Picard.binary_forms import BinaryForm, Mat2, discriminant, evaluate_discriminant, gl2_action, random_rational
from Picard.config import Config
from Picard.elimination import build_elimination, delta_weight_holds, sample_far_point
from Picard.errors import EmptyStack, InternalInconsistency, InvalidParams, OutOfRange
from Picard.lattices import (
    AbelianGroup,
    CharacterLattice,
    IntMatrix,
    bareiss_determinant,
    congruence_sublattice,
    lattice_quotient,
    pivot_columns,
    smith_invariants,
)
from Picard.observability import Observability

FAR_GENERATOR = "far generator"


class CoverParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: int
    g: int
    n: int
    d: int

    @model_validator(mode="after")
    def _riemann_hurwitz(self):
        if self.r < 2 or self.g < 2 or self.n < 0 or self.d < 1:
            raise ValueError("need r >= 2, g >= 2, n >= 0, d >= 1")
        if self.r * (self.r - 1) * self.d != 2 * self.g - 2 + 2 * self.r:
            raise ValueError("r(r-1)d must equal 2g-2+2r")
        return self

    @property
    def rd(self) -> int:
        return self.r * self.d

    def with_points(self, n: int) -> "CoverParams":
        """Same cover, n marked points; validated like a fresh instance."""
        if n < 0:
            raise InvalidParams(f"n must be non-negative, got {n}")
        return CoverParams.model_validate({**self.model_dump(), "n": n})


def make_params(r: int, g: int, n: int) -> CoverParams:
    if r < 2 or g < 2 or n < 0:
        raise InvalidParams(f"need r >= 2, g >= 2, n >= 0; got r={r} g={g} n={n}")
    numerator = 2 * g - 2 + 2 * r
    if numerator % (r * (r - 1)):
        raise EmptyStack("empty stack: d not integral")
    return CoverParams(r=r, g=g, n=n, d=numerator // (r * (r - 1)))


def params_from_d(r: int, d: int, n: int) -> CoverParams:
    if r < 2 or d < 1 or n < 0:
        raise InvalidParams(f"need r >= 2, d >= 1, n >= 0; got r={r} d={d} n={n}")
    g = (r * (r - 1) * d - 2 * r + 2) // 2
    if g < 2:
        raise InvalidParams(f"r={r}, d={d} gives genus {g}; need g >= 2")
    return CoverParams(r=r, g=g, n=n, d=d)


def character_lattice_for(params: CoverParams) -> CharacterLattice:
    d, n = params.d, params.n
    if n in (1, 2):
        return congruence_sublattice(2, [((1, 1), d)])
    if n >= 3:
        return congruence_sublattice(1, [((1,), d)])
    return congruence_sublattice(1, [((1,), d // 2 if d % 2 == 0 else d)])


def delta_class_for(params: CoverParams) -> Tuple[int, ...]:
    rd = params.rd
    weight = rd * (rd - 1)
    if params.n in (1, 2):
        return (weight, weight)
    if params.n >= 3:
        return (2 * weight,)
    return (weight,)


def unpointed_torsion(params: CoverParams) -> int:
    return params.r * (params.rd - 1) * gcd(params.d, 2)


def closed_form_far(params: CoverParams) -> AbelianGroup:
    if params.n >= 3:
        return AbelianGroup(free_rank=0, torsion=(2 * params.r * (params.rd - 1),))
    return AbelianGroup(free_rank=1 if params.n else 0, torsion=(unpointed_torsion(params),))


def closed_form_picard(params: CoverParams) -> AbelianGroup:
    r, n = params.r, params.n
    if n >= 3:
        return AbelianGroup(free_rank=(r - 2) * comb(n, 2) + n, torsion=(2 * r * (params.rd - 1),))
    free = {0: 0, 1: 1, 2: r}[n]
    return AbelianGroup(free_rank=free, torsion=(unpointed_torsion(params),))


def picard_far(params: CoverParams) -> AbelianGroup:
    if params.n > params.rd + 1:
        return AbelianGroup(free_rank=0, torsion=(2 * params.r * (params.rd - 1),))
    return lattice_quotient(character_lattice_for(params), [delta_class_for(params)])


class DivisorIndex(BaseModel):
    model_config = ConfigDict(frozen=True)

    i: int
    j: int
    l: int

    @model_validator(mode="after")
    def _ordered(self):
        if not 1 <= self.i < self.j:
            raise ValueError("divisor indices need 1 <= i < j")
        if self.l < 1:
            raise ValueError("divisor twist l must be at least 1")
        return self

    def label(self, r: int) -> str:
        if r == 2:
            return f"Z^{{{self.i},{self.j}}}"
        return f"Z^{{{self.i},{self.j},{self.l}}}"


def divisor_indices(r: int, n: int) -> List[DivisorIndex]:
    return [
        DivisorIndex(i=i, j=j, l=l)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        for l in range(1, r)
    ]


def _relation_pairs(n: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(2, n + 1) for j in range(i + 1, n + 1)]


def divisor_relation_matrix(r: int, n: int) -> IntMatrix:
    """Rows: [Z^{i,j}] - [Z^{1,i}] - [Z^{1,j}] - [Z^{2,n}] + [Z^{1,2}] + [Z^{1,n}] for 2 <= i < j <= n.

    [Z^{i,j}] stands for the sum over l, so each pair spreads over r-1 columns.
    """
    if r < 2 or n < 2:
        raise InvalidParams(f"relation matrix needs r >= 2 and n >= 2; got r={r} n={n}")
    columns = {(idx.i, idx.j, idx.l): c for c, idx in enumerate(divisor_indices(r, n))}
    rows = []
    for i, j in _relation_pairs(n):
        coefficients: Dict[Tuple[int, int], int] = {}
        for pair, sign in (((i, j), 1), ((1, i), -1), ((1, j), -1), ((2, n), -1), ((1, 2), 1), ((1, n), 1)):
            coefficients[pair] = coefficients.get(pair, 0) + sign
        row = [0] * len(columns)
        for (a, b), value in coefficients.items():
            for l in range(1, r):
                row[columns[(a, b, l)]] = value
        rows.append(row)
    return IntMatrix(rows, cols=len(columns))


@lru_cache(maxsize=None)
def relation_rank(r: int, n: int) -> Tuple[int, Tuple[int, ...]]:
    """Rank of the relation matrix and its nonzero invariant factors."""
    if n < 2:
        return 0, ()
    _, diagonal = smith_invariants(divisor_relation_matrix(r, n))
    nonzero = tuple(value for value in diagonal if value)
    return len(nonzero), nonzero


class TorsionOrigin(str, Enum):
    PULLBACK_FROM_UNPOINTED = "pullback_from_unpointed"
    SQUARE_ROOT_GENERATOR = "square_root_generator"


class PicardResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    params: CoverParams
    group: AbelianGroup
    far_group: AbelianGroup
    free_basis: Tuple[str, ...]
    basis_canonical: bool
    torsion_origin: TorsionOrigin

    def to_payload(self) -> dict:
        return {
            "r": self.params.r,
            "g": self.params.g,
            "n": self.params.n,
            "d": self.params.d,
            "free_rank": self.group.free_rank,
            "torsion": list(self.group.torsion),
            "far": self.far_group.to_payload(),
            "free_basis": list(self.free_basis),
            "basis_canonical": self.basis_canonical,
            "torsion_origin": self.torsion_origin.value,
        }


@lru_cache(maxsize=None)
def divisor_free_basis(r: int, n: int) -> Tuple[DivisorIndex, ...]:
    """Divisor classes spanning the free quotient of the relation lattice.

    The columns Z^{i,j,1} with 2 <= i < j, (i,j) != (2,n) carry unit pivots
    and are eliminated; the rest is a basis when the pivot block is unimodular.
    """
    indices = divisor_indices(r, n)
    if n < 3:
        return tuple(indices)
    m = divisor_relation_matrix(r, n)
    first = [c for c, idx in enumerate(indices) if idx.i >= 2 and (idx.i, idx.j) != (2, n)]
    first.sort(key=lambda c: (indices[c].l, indices[c].i, indices[c].j))
    eliminated = set(first)
    order = first + [c for c in range(len(indices)) if c not in eliminated]
    pivots = pivot_columns(m, order)
    live_rows = [row for row in range(m.rows) if any(m[row, c] for c in range(m.cols))]
    if len(live_rows) != len(pivots):
        raise InternalInconsistency("relation rows are not independent")
    block = m.submatrix(live_rows, pivots).to_list()
    if abs(bareiss_determinant(block)) != 1:
        raise InternalInconsistency("pivot block of the relation matrix is not unimodular")
    chosen = set(pivots)
    return tuple(idx for c, idx in enumerate(indices) if c not in chosen)


def picard_group(params: CoverParams) -> PicardResult:
    far = picard_far(params)
    r, n = params.r, params.n
    columns = (r - 1) * comb(n, 2)
    rank, factors = relation_rank(r, n)
    if any(value != 1 for value in factors):
        raise InternalInconsistency(f"divisor quotient has torsion {factors}")
    group = AbelianGroup(free_rank=columns - rank + far.free_rank, torsion=far.torsion)
    expected = closed_form_picard(params)
    if group != expected:
        raise InternalInconsistency(f"lattice computation gives {group}, closed form gives {expected}")
    basis = [idx.label(r) for idx in divisor_free_basis(r, n)] if n >= 2 else []
    basis += [FAR_GENERATOR] * far.free_rank
    if len(basis) != group.free_rank:
        raise InternalInconsistency(f"{len(basis)} basis labels for free rank {group.free_rank}")
    origin = (
        TorsionOrigin.PULLBACK_FROM_UNPOINTED
        if unpointed_torsion(params) == group.torsion_order
        else TorsionOrigin.SQUARE_ROOT_GENERATOR
    )
    result = PicardResult(
        params=params,
        group=group,
        far_group=far,
        free_basis=tuple(basis),
        basis_canonical=r == 2,
        torsion_origin=origin,
    )
    Observability.log_step("picard_group", params.model_dump(), {"group": str(group), "far": str(far)})
    return result


def unit_count_check(n: int, ranks: Sequence[int] = (2, 3, 4)) -> bool:
    if n < 3:
        raise OutOfRange(f"unit count needs n >= 3, got {n}")
    count = comb(n - 3, 2) + 2 * (n - 3)
    if not (count == n * (n - 3) // 2 == comb(n, 2) - n) or (n * (n - 3)) % 2:
        return False
    return all(relation_rank(r, n)[0] == count for r in ranks)


def relation_rank_check(r: int, n: int) -> bool:
    """rank = C(n,2) - n and the quotient is free of rank (r-2)C(n,2) + n."""
    rank, factors = relation_rank(r, n)
    free = (r - 1) * comb(n, 2) - rank
    return rank == comb(n, 2) - n and all(f == 1 for f in factors) and free == (r - 2) * comb(n, 2) + n


def monotone_stability_check(r: int, n: int, n_prime: int) -> bool:
    """Relations at n stay in the relation span at n' >= n under index inclusion."""
    if n_prime < n or n < 2:
        raise OutOfRange(f"need 2 <= n <= n'; got n={n} n'={n_prime}")
    small = divisor_relation_matrix(r, n)
    big = divisor_relation_matrix(r, n_prime)
    target = {(idx.i, idx.j, idx.l): c for c, idx in enumerate(divisor_indices(r, n_prime))}
    embedded = []
    for row in small.to_list():
        wide = [0] * big.cols
        for c, idx in enumerate(divisor_indices(r, n)):
            wide[target[(idx.i, idx.j, idx.l)]] = row[c]
        embedded.append(wide)
    stacked = IntMatrix(big.to_list() + embedded, cols=big.cols)
    return stacked.rank() == big.rank()


def valid_params_grid(ranks: Sequence[int] = (2, 3, 4), max_genus: Optional[int] = None) -> List[CoverParams]:
    """Every non-empty (r, g) with g <= max_genus, paired with n = 0."""
    max_genus = max_genus or Config.GRID_MAX_GENUS
    out = []
    for r in ranks:
        for g in range(2, max_genus + 1):
            if (2 * g - 2 + 2 * r) % (r * (r - 1)) == 0:
                out.append(make_params(r, g, 0))
    return out


def _far_case(params: CoverParams) -> dict:
    pipeline = lattice_quotient(character_lattice_for(params), [delta_class_for(params)])
    expected = closed_form_far(params)
    return {
        "r": params.r,
        "g": params.g,
        "d": params.d,
        "n": params.n,
        "pipeline": str(pipeline),
        "closed_form": str(expected),
        "agree": pipeline == expected,
    }


def grid_cross_check(ranks: Sequence[int] = (2, 3, 4), max_genus: Optional[int] = None) -> pd.DataFrame:
    """Lattice pipeline vs closed form for every n in 0..rd+1."""
    cases = [
        base.with_points(n)
        for base in valid_params_grid(ranks, max_genus)
        for n in range(0, base.rd + 2)
    ]
    with ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as executor:
        rows = list(executor.map(_far_case, cases))
    return pd.DataFrame(rows, columns=["r", "g", "d", "n", "pipeline", "closed_form", "agree"])


def parity_check(params: CoverParams) -> bool:
    """Torsion is 2r(rd-1) exactly when d is even or n >= 3, else r(rd-1)."""
    group = picard_group(params).group
    base = params.r * (params.rd - 1)
    doubled = params.d % 2 == 0 or params.n >= 3
    return group.torsion_order == (2 * base if doubled else base)


def _torus_phi(params: CoverParams, a_coeffs: Sequence[Fraction], s1: Fraction, s2: Optional[Fraction]) -> Fraction:
    rd, r = params.rd, params.r
    coefficients = list(a_coeffs) + [s1 ** r]
    if s2 is not None:
        coefficients[0] = s2 ** r
    return evaluate_discriminant(BinaryForm(coefficients, rd))


def delta_weight_check(params: CoverParams, trials: int, seed: int) -> bool:
    """Evaluation check that the discriminant has weight delta_class_for(params)."""
    n, rd, d = params.n, params.rd, params.d
    if n > rd + 1:
        raise OutOfRange(f"no presentation for n={n} > rd+1={rd + 1}")
    rng = np.random.default_rng(seed)
    weight = delta_class_for(params)
    height = Config.SAMPLE_HEIGHT
    for _ in range(trials):
        if n == 0:
            form = BinaryForm.random(rng, rd)
            matrix = Mat2.random(rng)
            if discriminant(gl2_action(matrix, form)) != matrix.det() ** (-weight[0]) * discriminant(form):
                return False
            continue
        if n >= 3:
            data = build_elimination(params.r, params.d, n)
            pt = sample_far_point(data, rng)
            if not delta_weight_holds(data, pt, random_rational(rng, height, nonzero=True), weight[0]):
                return False
            continue
        a = random_rational(rng, 20, nonzero=True)
        c = random_rational(rng, 20, nonzero=True)
        a_coeffs = [random_rational(rng, height) for _ in range(rd)]
        s1 = random_rational(rng, height)
        s2 = random_rational(rng, height) if n == 2 else None
        moved = [a ** (i - rd) * c ** (-i) * x for i, x in enumerate(a_coeffs)]
        moved_s1 = c ** (-d) * s1
        moved_s2 = None if s2 is None else a ** (-d) * s2
        before = _torus_phi(params, a_coeffs, s1, s2)
        after = _torus_phi(params, moved, moved_s1, moved_s2)
        if after != a ** (-weight[0]) * c ** (-weight[1]) * before:
            return False
    return True
