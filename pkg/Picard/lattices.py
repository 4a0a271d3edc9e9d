"""Integer linear algebra: Smith normal form, congruence sublattices, quotients."""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from sympy import factorint

from Picard.errors import NotDivisible, NotInSublattice


def _exact_quotient(numerator, denominator):
    if isinstance(numerator, int) and isinstance(denominator, int):
        quotient, remainder = divmod(numerator, denominator)
        if remainder:
            raise NotDivisible(f"{denominator} does not divide {numerator}")
        return quotient
    if hasattr(numerator, "exact_divide"):
        return numerator.exact_divide(denominator)
    return numerator / denominator


def bareiss_determinant(rows: Sequence[Sequence]):
    """Fraction-free determinant; works for ints, Fractions and polynomials."""
    m = [list(row) for row in rows]
    size = len(m)
    if size == 0:
        return 1
    if any(len(row) != size for row in m):
        raise ValueError("determinant needs a square matrix")
    sign = 1
    previous = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if m[i][k] != 0), None)
            if swap is None:
                return 0 * m[k][k]
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = _exact_quotient(m[i][j] * pivot - m[i][k] * m[k][j], previous)
            m[i][k] = 0 * pivot
        previous = pivot
    return m[-1][-1] if sign > 0 else -m[-1][-1]


class IntMatrix:
    """Dense matrix of Python ints held in a numpy object array."""

    __slots__ = ("_a",)

    def __init__(self, entries, cols: Optional[int] = None):
        if isinstance(entries, IntMatrix):
            data = entries._a.copy()
        else:
            rows = [[int(x) for x in row] for row in entries]
            width = cols if cols is not None else (len(rows[0]) if rows else 0)
            data = np.empty((len(rows), width), dtype=object)
            for i, row in enumerate(rows):
                if len(row) != width:
                    raise ValueError("ragged matrix rows")
                for j, value in enumerate(row):
                    data[i, j] = value
        self._a = data

    @classmethod
    def _from_array(cls, array: np.ndarray) -> "IntMatrix":
        matrix = object.__new__(cls)
        matrix._a = array
        return matrix

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls._from_array(_zeros(rows, cols))

    @classmethod
    def identity(cls, k: int) -> "IntMatrix":
        return cls._from_array(_identity(k))

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def array(self) -> np.ndarray:
        return self._a.copy()

    def __getitem__(self, index):
        return self._a[index]

    def to_list(self) -> List[List[int]]:
        return [[int(x) for x in row] for row in self._a]

    def transpose(self) -> "IntMatrix":
        return IntMatrix._from_array(self._a.T.copy())

    def submatrix(self, row_index: Sequence[int], col_index: Sequence[int]) -> "IntMatrix":
        out = _zeros(len(row_index), len(col_index))
        for a, i in enumerate(row_index):
            for b, j in enumerate(col_index):
                out[a, b] = self._a[i, j]
        return IntMatrix._from_array(out)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        if self.cols == 0:
            return IntMatrix.zeros(self.rows, other.cols)
        return IntMatrix._from_array(np.dot(self._a, other._a))

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and self.to_list() == other.to_list()

    __hash__ = None

    def det(self) -> int:
        return int(bareiss_determinant(self.to_list()))

    def rank(self) -> int:
        _, diagonal = smith_invariants(self)
        return sum(1 for value in diagonal if value)

    def is_diagonal(self) -> bool:
        return all(self._a[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal(self) -> List[int]:
        return [int(self._a[i, i]) for i in range(min(self.rows, self.cols))]

    def __repr__(self):
        return f"IntMatrix({self.to_list()})"


def _zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(0)
    return out


def _identity(k: int) -> np.ndarray:
    out = _zeros(k, k)
    for i in range(k):
        out[i, i] = 1
    return out


def _min_abs_position(d: np.ndarray, t: int) -> Optional[Tuple[int, int]]:
    best = None
    for i in range(t, d.shape[0]):
        for j in range(t, d.shape[1]):
            value = d[i, j]
            if value and (best is None or abs(value) < best[0]):
                best = (abs(value), i, j)
                if best[0] == 1:
                    return i, j
    return None if best is None else (best[1], best[2])


def smith_normal_form(m: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Returns (U, D, V) with U @ M @ V == D, U and V unimodular.

    Pivots on the entry of least absolute value; D carries the divisibility
    chain d_1 | d_2 | ... on its diagonal with d_i >= 0.
    """
    d = m.array
    rows, cols = d.shape
    u = _identity(rows)
    v = _identity(cols)
    for t in range(min(rows, cols)):
        while True:
            position = _min_abs_position(d, t)
            if position is None:
                return IntMatrix._from_array(u), IntMatrix._from_array(d), IntMatrix._from_array(v)
            i, j = position
            if i != t:
                d[[t, i], :] = d[[i, t], :]
                u[[t, i], :] = u[[i, t], :]
            if j != t:
                d[:, [t, j]] = d[:, [j, t]]
                v[:, [t, j]] = v[:, [j, t]]
            pivot = d[t, t]
            clean = True
            for i in range(t + 1, rows):
                q = d[i, t] // pivot
                if q:
                    d[i, :] = d[i, :] - q * d[t, :]
                    u[i, :] = u[i, :] - q * u[t, :]
                if d[i, t]:
                    clean = False
            for j in range(t + 1, cols):
                q = d[t, j] // pivot
                if q:
                    d[:, j] = d[:, j] - q * d[:, t]
                    v[:, j] = v[:, j] - q * v[:, t]
                if d[t, j]:
                    clean = False
            if not clean:
                continue
            offender = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if d[i, j] % pivot),
                None,
            )
            if offender is None:
                break
            d[t, :] = d[t, :] + d[offender, :]
            u[t, :] = u[t, :] + u[offender, :]
        if d[t, t] < 0:
            d[t, :] = -d[t, :]
            u[t, :] = -u[t, :]
    return IntMatrix._from_array(u), IntMatrix._from_array(d), IntMatrix._from_array(v)


def smith_invariants(m: IntMatrix) -> Tuple[IntMatrix, List[int]]:
    _, d, v = smith_normal_form(m)
    return v, d.diagonal()


def hermite_rows(rows: Sequence[Sequence[int]], width: int) -> List[List[int]]:
    """Row-style Hermite form: nonzero rows, positive pivots, reduced above."""
    a = [list(row) for row in rows]
    top = 0
    for c in range(width):
        while True:
            live = [i for i in range(top, len(a)) if a[i][c]]
            if not live:
                break
            best = min(live, key=lambda i: abs(a[i][c]))
            a[top], a[best] = a[best], a[top]
            settled = True
            for i in range(top + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[top][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[top])]
                    if a[i][c]:
                        settled = False
            if settled:
                break
        if top >= len(a) or not a[top][c]:
            continue
        if a[top][c] < 0:
            a[top] = [-x for x in a[top]]
        for i in range(top):
            q = a[i][c] // a[top][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[top])]
        top += 1
    return a[:top]


def solve_rational(matrix: Sequence[Sequence], rhs: Sequence) -> Optional[List[Fraction]]:
    """Solve matrix @ x = rhs exactly; None when inconsistent."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    aug = [[Fraction(x) for x in matrix[i]] + [Fraction(rhs[i])] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if aug[i][c]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        lead = aug[r][c]
        aug[r] = [x / lead for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                factor = aug[i][c]
                aug[i] = [x - factor * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(aug[i][cols] for i in range(r, rows)):
        return None
    solution = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        solution[c] = aug[i][cols]
    return solution


def pivot_columns(m: IntMatrix, order: Sequence[int]) -> List[int]:
    """Greedily pick columns, in the given order, that raise the rank."""
    basis: List[Tuple[int, List[Fraction]]] = []
    chosen = []
    for c in order:
        vector = [Fraction(int(m[i, c])) for i in range(m.rows)]
        for p, b in basis:
            if vector[p]:
                factor = vector[p]
                vector = [x - factor * y for x, y in zip(vector, b)]
        lead = next((i for i, x in enumerate(vector) if x), None)
        if lead is None:
            continue
        vector = [x / vector[lead] for x in vector]
        reduced = []
        for p, b in basis:
            if b[lead]:
                factor = b[lead]
                b = [x - factor * y for x, y in zip(b, vector)]
            reduced.append((p, b))
        basis = reduced + [(lead, vector)]
        chosen.append(c)
    return chosen


class AbelianGroup(BaseModel):
    """Z^free_rank (+) Z/d_1 (+) ... with d_1 | d_2 | ..."""

    model_config = ConfigDict(frozen=True)

    free_rank: int = Field(ge=0)
    torsion: Tuple[int, ...] = ()

    @field_validator("torsion")
    @classmethod
    def _chain(cls, value):
        for d in value:
            if d < 2:
                raise ValueError("invariant factors must be at least 2")
        for a, b in zip(value, value[1:]):
            if b % a:
                raise ValueError(f"invariant factors {a} and {b} break the divisibility chain")
        return value

    @classmethod
    def from_invariants(cls, free_rank: int, factors: Sequence[int]) -> "AbelianGroup":
        """Normalize arbitrary cyclic orders into invariant-factor form."""
        primes = {}
        for order in factors:
            order = abs(int(order))
            if order == 0:
                free_rank += 1
                continue
            for prime, exponent in factorint(order).items():
                primes.setdefault(int(prime), []).append(int(prime) ** int(exponent))
        columns = max((len(powers) for powers in primes.values()), default=0)
        invariants = [1] * columns
        for powers in primes.values():
            powers.sort(reverse=True)
            for k, power in enumerate(powers):
                invariants[columns - 1 - k] *= power
        return cls(free_rank=free_rank, torsion=tuple(d for d in invariants if d > 1))

    @property
    def torsion_order(self) -> int:
        return reduce(lambda x, y: x * y, self.torsion, 1)

    def to_payload(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " (+) ".join(parts) if parts else "0"


class CharacterLattice:
    """Sublattice of Z^ambient_rank given by a row basis."""

    def __init__(self, ambient_rank: int, basis: IntMatrix):
        if basis.cols != ambient_rank:
            raise ValueError("basis width must equal the ambient rank")
        if basis.rank() != basis.rows:
            raise ValueError("basis rows must be linearly independent")
        self.ambient_rank = ambient_rank
        self.basis = basis

    @property
    def rank(self) -> int:
        return self.basis.rows

    def index(self) -> int:
        if self.rank != self.ambient_rank:
            raise ValueError("index is only finite for full-rank sublattices")
        return abs(self.basis.det())

    def coordinates(self, vector: Sequence[int]) -> List[int]:
        if len(vector) != self.ambient_rank:
            raise ValueError("vector has the wrong length")
        solution = solve_rational(self.basis.transpose().to_list(), list(vector))
        if solution is None or any(x.denominator != 1 for x in solution):
            raise NotInSublattice(f"{tuple(vector)} is not in the lattice")
        return [int(x) for x in solution]

    def contains(self, vector: Sequence[int]) -> bool:
        try:
            self.coordinates(vector)
        except NotInSublattice:
            return False
        return True

    def __repr__(self):
        return f"CharacterLattice({self.ambient_rank}, {self.basis.to_list()})"


def congruence_sublattice(ambient_rank: int, congruences: Sequence[Tuple[Sequence[int], int]]) -> CharacterLattice:
    """{v in Z^k : c.v = 0 mod m for every (c, m)} via the SNF kernel of [C | -diag(m)]."""
    if not congruences:
        return CharacterLattice(ambient_rank, IntMatrix.identity(ambient_rank))
    q = len(congruences)
    system = []
    for row, (coeffs, modulus) in enumerate(congruences):
        if modulus < 1:
            raise ValueError("congruence moduli must be at least 1")
        if len(coeffs) != ambient_rank:
            raise ValueError("congruence coefficient vector has the wrong length")
        slack = [0] * q
        slack[row] = -modulus
        system.append(list(coeffs) + slack)
    v, diagonal = smith_invariants(IntMatrix(system))
    rank = sum(1 for value in diagonal if value)
    generators = [[int(v[i, j]) for i in range(ambient_rank)] for j in range(rank, ambient_rank + q)]
    return CharacterLattice(ambient_rank, IntMatrix(hermite_rows(generators, ambient_rank), cols=ambient_rank))


def lattice_quotient(lattice: CharacterLattice, generators: Sequence[Sequence[int]]) -> AbelianGroup:
    coords = [lattice.coordinates(g) for g in generators]
    if not coords:
        return AbelianGroup(free_rank=lattice.rank)
    _, diagonal = smith_invariants(IntMatrix(coords, cols=lattice.rank))
    nonzero = [value for value in diagonal if value]
    return AbelianGroup(free_rank=lattice.rank - len(nonzero), torsion=tuple(d for d in nonzero if d > 1))


def random_int_matrix(rng: np.random.Generator, rows: int, cols: int, bound: int) -> IntMatrix:
    values = rng.integers(-bound, bound + 1, size=(rows, cols))
    return IntMatrix([[int(x) for x in row] for row in values], cols=cols)


def snf_contract_failures(m: IntMatrix) -> List[str]:
    """Everything wrong with smith_normal_form(m); empty when the contract holds."""
    u, d, v = smith_normal_form(m)
    failed = []
    if u @ m @ v != d:
        failed.append("U*M*V != D")
    if abs(u.det()) != 1 or abs(v.det()) != 1:
        failed.append("U or V not unimodular")
    if not d.is_diagonal():
        failed.append("D not diagonal")
    diagonal = d.diagonal()
    if any(x < 0 for x in diagonal):
        failed.append("negative invariant factor")
    for a, b in zip(diagonal, diagonal[1:]):
        if (a == 0 and b != 0) or (a and b % a):
            failed.append(f"chain broken at {a} | {b}")
            break
    if m.rows == m.cols and m.rows:
        det = m.det()
        if det and abs(det) != reduce(lambda x, y: x * y, diagonal, 1):
            failed.append("|det M| != product of invariant factors")
    return failed
