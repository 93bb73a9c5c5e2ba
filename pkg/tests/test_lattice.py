import pytest

from scatterlab.lattice import (atoms_of, build_lattice, characteristic_polynomial,
                                critical_exponent, lattice_of, verify_crapo_rota)
from scatterlab.spreads import (PartialSpread, construct_tight_spread, desarguesian_spread,
                                partial_spread_tight, spread_from_points)
from scatterlab.subspaces import canonicalize


def _two_planes(t22):
    F = t22.base
    S1 = canonicalize(F, [[1, 0, 0, 0], [0, 1, 0, 0]], 4)
    S2 = canonicalize(F, [[0, 0, 1, 0], [0, 0, 0, 1]], 4)
    return PartialSpread(F, 4, 2, "adhoc", elements=[S1, S2])


def test_atoms(t22):
    D = desarguesian_spread(t22, 2)
    assert len(atoms_of(D, 0)) == 15
    assert atoms_of(D, 1) == sorted(D.elements)
    assert atoms_of(D, 2) == []


def test_lattice_shapes(t22):
    D = desarguesian_spread(t22, 2)
    L = lattice_of(D, 1)
    assert len(L) == 7 and L.mobius[0] == 1
    assert len(build_lattice(D.elements[:1], t22.base, 4)) == 2
    E = build_lattice([], t22.base, 4)
    assert len(E) == 1 and characteristic_polynomial(E).descending() == [1, 0, 0, 0, 0]


def test_mobius_sums_vanish(t22):
    L = lattice_of(desarguesian_spread(t22, 3), 1)
    for i in range(1, len(L)):
        assert L.mobius[i] + sum(L.mobius[j] for j in L.below[i]) == 0


def test_chi_known_polynomial(t22):
    L = lattice_of(desarguesian_spread(t22, 2), 1)
    chi = characteristic_polynomial(L)
    assert chi.descending() == [1, 0, -5, 0, 4]
    assert chi(1) == 0
    assert critical_exponent(L, 2) == 2


def test_atom_coefficient(t22):
    D = desarguesian_spread(t22, 3)
    for h in (0, 1):
        L = lattice_of(D, h)
        chi = characteristic_polynomial(L)
        assert chi.coeffs.get(6 - (h + 1)) == -len(L.atoms)


@pytest.mark.parametrize("h,expected", [(1, 2), (2, 4)])
def test_crapo_rota_desarguesian(t22, h, expected):
    r = verify_crapo_rota(desarguesian_spread(t22, 2), h)
    assert r.holds and r.lhs == expected


def test_crapo_rota_partial_spreads(t22, t23):
    assert verify_crapo_rota(_two_planes(t22), 1).holds
    P, _ = partial_spread_tight(t22, 2, 1)
    assert verify_crapo_rota(P, 1).lhs == 3
    assert verify_crapo_rota(spread_from_points(t23, 2, [[1, 0], [0, 1], [1, 1]]), 1).holds
    A, _ = construct_tight_spread(t22, 2, 1)
    assert verify_crapo_rota(A, 1).holds
