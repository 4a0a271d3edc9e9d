import numpy as np
import pytest
import sympy

from Picard.errors import NotInSublattice
from Picard.lattices import (
    AbelianGroup,
    IntMatrix,
    bareiss_determinant,
    congruence_sublattice,
    lattice_quotient,
    random_int_matrix,
    smith_normal_form,
    snf_contract_failures,
)


def test_snf_small_examples():
    _, d, _ = smith_normal_form(IntMatrix([[2, 4], [6, 8]]))
    assert d.diagonal() == [2, 4]
    _, d, _ = smith_normal_form(IntMatrix([[2, 0], [0, 3]]))
    assert d.diagonal() == [1, 6]
    _, d, _ = smith_normal_form(IntMatrix([[0, 0], [0, 0]]))
    assert d.diagonal() == [0, 0]


def test_snf_contract_on_random_matrices():
    rng = np.random.default_rng(0)
    for _ in range(200):
        rows, cols = (int(x) for x in rng.integers(1, 9, size=2))
        matrix = random_int_matrix(rng, rows, cols, 50)
        assert snf_contract_failures(matrix) == []


def test_bareiss_matches_sympy():
    rng = np.random.default_rng(4)
    for size in (1, 3, 5, 7):
        matrix = random_int_matrix(rng, size, size, 30)
        assert matrix.det() == int(sympy.Matrix(matrix.to_list()).det())
    assert bareiss_determinant([]) == 1
    assert bareiss_determinant([[0, 1], [1, 0]]) == -1


def test_int_matrix_operations():
    m = IntMatrix([[1, 2], [3, 4]])
    assert (m @ IntMatrix.identity(2)) == m
    assert m.transpose().to_list() == [[1, 3], [2, 4]]
    assert m.submatrix([1], [0, 1]).to_list() == [[3, 4]]
    assert m.rank() == 2
    assert IntMatrix([[1, 2], [2, 4]]).rank() == 1
    with pytest.raises(ValueError):
        IntMatrix([[1, 2], [3]])


def test_congruence_sublattice_examples():
    diagonal = congruence_sublattice(2, [((1, 1), 3)])
    assert diagonal.index() == 3
    assert diagonal.contains((1, 2))
    assert diagonal.contains((3, 0))
    assert not diagonal.contains((1, 1))

    multiples = congruence_sublattice(1, [((1,), 3)])
    assert multiples.index() == 3
    assert multiples.coordinates((60,)) == [20]

    evens = congruence_sublattice(1, [((1,), 2)])
    assert evens.index() == 2


def test_coordinates_outside_lattice():
    with pytest.raises(NotInSublattice):
        congruence_sublattice(1, [((1,), 3)]).coordinates((4,))


def test_lattice_quotient_examples():
    multiples = congruence_sublattice(1, [((1,), 3)])
    assert lattice_quotient(multiples, [(60,)]) == AbelianGroup(free_rank=0, torsion=(20,))
    diagonal = congruence_sublattice(2, [((1, 1), 3)])
    assert lattice_quotient(diagonal, [(30, 30)]) == AbelianGroup(free_rank=1, torsion=(10,))
    assert lattice_quotient(diagonal, []) == AbelianGroup(free_rank=2)


def test_abelian_group_rendering():
    assert str(AbelianGroup(free_rank=3, torsion=(20,))) == "Z^3 (+) Z/20"
    assert str(AbelianGroup(free_rank=1)) == "Z"
    assert str(AbelianGroup(free_rank=0)) == "0"
    assert AbelianGroup(free_rank=0, torsion=(2, 10)).torsion_order == 20


def test_abelian_group_normalizes_invariants():
    assert AbelianGroup.from_invariants(0, [4, 6]) == AbelianGroup(free_rank=0, torsion=(2, 12))
    assert AbelianGroup.from_invariants(1, [1, 5, 0]) == AbelianGroup(free_rank=2, torsion=(5,))


def test_abelian_group_rejects_broken_chain():
    with pytest.raises(ValueError):
        AbelianGroup(free_rank=0, torsion=(4, 6))
    with pytest.raises(ValueError):
        AbelianGroup(free_rank=0, torsion=(1,))


def test_abelian_group_normalizes_large_orders():
    q = 1000003
    group = AbelianGroup.from_invariants(0, [8 * q, 6 * q])
    assert group == AbelianGroup(free_rank=0, torsion=(2 * q, 24 * q))
    assert group.torsion_order == 48 * q * q


def test_snf_of_unimodular_change_of_basis():
    _, d, _ = smith_normal_form(IntMatrix([[2, -3], [-1, 2]]))
    assert d == IntMatrix.identity(2)
    _, d, _ = smith_normal_form(IntMatrix.identity(3))
    assert d == IntMatrix.identity(3)


def test_congruence_sublattice_mod_two_and_trivial():
    evens = congruence_sublattice(2, [((1, 1), 2)])
    assert evens.index() == 2
    assert evens.contains((1, 1))
    assert not evens.contains((1, 0))
    trivial = congruence_sublattice(1, [((1,), 1)])
    assert trivial.index() == 1
    assert trivial.contains((1,)) and trivial.contains((-7,))


def test_quotients_of_the_full_lattice():
    plane = congruence_sublattice(2, [])
    assert lattice_quotient(plane, [(2, 0), (0, 3)]) == AbelianGroup(free_rank=0, torsion=(6,))
    assert lattice_quotient(plane, [(1, 0)]) == AbelianGroup(free_rank=1)


def test_lattice_quotient_rejects_outside_generators():
    diagonal = congruence_sublattice(2, [((1, 1), 3)])
    with pytest.raises(NotInSublattice):
        lattice_quotient(diagonal, [(1, 0)])


def _random_unimodular(rng, k):
    rows = IntMatrix.identity(k).to_list()
    for _ in range(10):
        i, j = (int(x) for x in rng.choice(k, size=2, replace=False))
        c = int(rng.integers(-3, 4))
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return IntMatrix(rows)


def test_lattice_quotient_ignores_regeneration():
    diagonal = congruence_sublattice(2, [((1, 1), 3)])
    gens = IntMatrix([[30, 30], [6, 3], [3, 0]])
    expected = lattice_quotient(diagonal, gens.to_list())
    assert expected == AbelianGroup(free_rank=0, torsion=(3,))
    rng = np.random.default_rng(11)
    for _ in range(20):
        w = _random_unimodular(rng, gens.rows)
        assert abs(w.det()) == 1
        assert lattice_quotient(diagonal, (w @ gens).to_list()) == expected


@pytest.mark.parametrize("r", [2, 3, 4])
@pytest.mark.parametrize("d", range(1, 9))
def test_delta_quotient_parity(r, d):
    order = r * (r * d - 1)
    group = lattice_quotient(congruence_sublattice(2, []), [(order * d, order * 2)])
    expected = 2 * order if d % 2 == 0 else order
    assert group == AbelianGroup(free_rank=1, torsion=(expected,))
