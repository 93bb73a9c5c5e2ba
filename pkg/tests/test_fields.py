import itertools

import numpy as np
import pytest

from scatterlab.errors import ValidationError
from scatterlab.fields import (FiniteField, is_irreducible, least_irreducible, make_field,
                               make_tower, prime_power, tower_for)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81])
def test_field_axioms_sampled(q):
    F = make_field(q)
    rng = np.random.default_rng(q)
    a, b, c = (rng.integers(0, q, 200) for _ in range(3))
    assert (F.add(a, F.add(b, c)) == F.add(F.add(a, b), c)).all()
    assert (F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))).all()
    assert (F.add(a, F.neg(a)) == 0).all()
    nz = F.nonzero()
    assert (F.mul(nz, F.inv(nz)) == 1).all()


@pytest.mark.parametrize("q", [4, 8, 9, 16, 27])
def test_primitive_generates(q):
    F = make_field(q)
    powers = {F.pow(F.primitive, i) for i in range(q - 1)}
    assert len(powers) == q - 1


def test_default_moduli():
    assert make_field(4).modulus == (1, 1, 1)
    assert make_field(9).modulus == (1, 0, 1)
    assert make_field(16).modulus == (1, 1, 0, 0, 1)
    assert make_tower(3, 2, 2).top.modulus == (4, 0, 1)


def test_prime_power():
    assert prime_power(64) == (2, 6)
    assert prime_power(7) == (7, 1)
    with pytest.raises(ValidationError):
        prime_power(12)


def test_reducible_modulus_rejected():
    with pytest.raises(ValidationError):
        FiniteField(2, 2, (1, 0, 1))  # x^2 + 1 = (x + 1)^2


def test_irreducibility_counts():
    # number of monic irreducible polynomials of degree 4 over F_2 is 3
    F = make_field(2)
    count = sum(is_irreducible(c + (1,), F) for c in itertools.product(range(2), repeat=4))
    assert count == 3
    assert least_irreducible(3, F) == (1, 1, 0, 1)


@pytest.mark.parametrize("q,m", [(2, 2), (2, 3), (3, 2), (4, 2), (2, 5), (9, 2)])
def test_tower_frobenius_and_trace(q, m):
    t = tower_for(q, m)
    x = t.top.elements()
    assert (t.frobenius(x, m) == x).all()
    fixed = x[t.frobenius(x, 1) == x]
    assert sorted(fixed.tolist()) == list(range(q))  # F_q sits as codes [0, q)
    tr = np.asarray(t.trace(x))
    assert ((tr >= 0) & (tr < q)).all()
    # trace is onto and balanced
    assert np.bincount(tr, minlength=q).tolist() == [q ** (m - 1)] * q


def test_coords_roundtrip_and_linearity(t23):
    x = t23.top.elements()
    assert (t23.uncoords(t23.coords(x)) == x).all()
    a, b = 3, 6
    lhs = t23.coords(t23.top.add(a, b))
    rhs = (t23.coords(a) + t23.coords(b)) % 2
    assert (lhs == rhs).all()


def test_tower_serialization(t32):
    from scatterlab.fields import FieldTower
    assert FieldTower.from_tuple(t32.to_tuple()) == t32


def test_order_cap():
    with pytest.raises(ValidationError):
        make_tower(2, 1, 21)
