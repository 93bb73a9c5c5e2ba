import numpy as np
import pytest

from scatterlab.errors import ValidationError
from scatterlab.expansion import expand, fq_expansion
from scatterlab.fields import tower_for
from scatterlab.minimal import (code_from_system, construct_minimal_code, cutting_from_scattered,
                                dumps_vector_code, gamma, is_cutting, is_minimal_code, linear_set,
                                loads_vector_code, rank_support)
from scatterlab.scattered import construct_family
from scatterlab.subspaces import canonicalize, sample_subspace


def test_linear_set_weights(t22):
    U = construct_family("even-n", t22, t=1)
    L = linear_set(U, t22, 2)
    assert len(L) == 3 and set(L.weights.tolist()) == {1} and L.partition_holds()
    P = fq_expansion(t22, [[1, 1]], 2)
    L = linear_set(P, t22, 2)
    assert len(L) == 1 and L.weights.tolist() == [2]


def test_partition_identity_random(t23):
    rng = np.random.default_rng(0)
    for _ in range(20):
        U = sample_subspace(t23.base, 9, int(rng.integers(1, 9)), rng)
        assert linear_set(U, t23, 3).partition_holds()


def test_all_points_cutting(t22):
    full = canonicalize(t22.base, np.eye(6, dtype=int), 6)
    assert is_cutting(linear_set(full, t22, 3), 1)
    assert is_cutting(linear_set(full, t22, 3), 2)


def test_cutting_counterexample(t24):
    Y = canonicalize(t24.base, fq_expansion(t24, [[1, 0, 0]], 3).rows[:3], 12)
    U = canonicalize(t24.base, np.vstack([Y.rows, fq_expansion(t24, [[0, 0, 1]], 3).rows]), 12)
    assert not is_cutting(linear_set(U, t24, 3), 1)


def test_cutting_from_scattered(t23, t24):
    U, L = cutting_from_scattered(t23, 3, 2)
    assert U.dim == 6
    U, L = cutting_from_scattered(t24, 3, 2)
    assert U.dim == 7 and is_cutting(L, 1)
    with pytest.raises(ValidationError):
        cutting_from_scattered(t23, 4, 3)


def test_rank_support_basis_independent(t24):
    rng = np.random.default_rng(1)
    other = [1, 3, 7, 15]  # another F_2-basis of F_16 in integer codes
    for _ in range(20):
        c = rng.integers(0, 16, 6)
        assert rank_support(c, t24) == rank_support(c, t24, other)
    with pytest.raises(ValidationError):
        gamma([1], t24, [1, 2, 3, 1])


def test_k1_code_minimal(t24):
    U = canonicalize(t24.base, np.eye(4, dtype=int)[:3], 4)
    C = code_from_system(U, t24, 1)
    assert is_minimal_code(C).minimal


def test_minimal_construction(t24):
    rep = construct_minimal_code(t24)
    C = rep.code
    assert (C.length, C.k) == (7, 3) and C.nondegenerate
    assert rep.minimality.minimal and rep.minimality.agree and rep.minimality.weight_identity
    assert rep.cutting.subspaces_checked == 273


def test_non_minimal_certificate(t24):
    rows = np.vstack([fq_expansion(t24, [[1, 0, 0]], 3).rows, expand(t24, [[0, 1, 0]]),
                      expand(t24, [[0, 0, 1]])])
    C = code_from_system(canonicalize(t24.base, rows, 12), t24, 3)
    rep = is_minimal_code(C)
    assert not rep.minimal and rep.agree
    x, y = rep.certificate
    assert rank_support(C.encode(x), t24).dim < rank_support(C.encode(y), t24).dim
    assert rank_support(C.encode(y), t24).contains_subspace(rank_support(C.encode(x), t24))


def test_vector_code_roundtrip(t24):
    C = construct_minimal_code(t24, check_minimality=False).code
    D = loads_vector_code(dumps_vector_code(C), t24)
    assert (D.G == C.G).all()


@pytest.mark.slow
def test_minimal_construction_q2_m5():
    rep = construct_minimal_code(tower_for(2, 5))
    assert rep.code.length == 8 and rep.minimality.minimal
